"""Check the no-eclipse condition of a geometry"""

import click

from scatterlen_cli.commands.common import DOMAIN_ERRORS, done, fail, geometry_option, load_system, run_config
from scatterlen_cli.core.geometry import read_geometry, validate_no_eclipse
from scatterlen_cli.utils.report_writer import echo_table, write_csv


@click.command(
    name="validate",
    help="Check condition (H): no disk meets the convex hull of two others",
    short_help="Validate a geometry"
)
@geometry_option
@click.pass_context
def validate(ctx, geometry):
    """Check condition (H) for a geometry file"""
    try:
        config = run_config(ctx, geometry=geometry)
        # read without the (H) gate so failing triples can be listed
        system = read_geometry(config.geometry) if config.geometry else load_system(config)
        report = validate_no_eclipse(system)
        path = write_csv(config.output_path('validation.csv'), ['i', 'j', 'l'], report.violations)
        echo_table(['disk', 'x', 'y', 'radius'],
                   [(n, d.center[0], d.center[1], d.radius) for n, d in enumerate(system.disks, start=1)])
        click.echo(f"min gap: {system.min_gap:.6g}  worst margin: {report.worst_margin:.6g}")
        done("validate", report.summary())
        if not report.passed:
            fail("validate", f"geometry rejected; violating triples written to {path}")
    except (OSError, DOMAIN_ERRORS) as e:
        fail("validate", e)
