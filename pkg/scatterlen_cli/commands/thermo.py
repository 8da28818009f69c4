"""Thermodynamic quantities of the length spectrum"""

import numpy as np
import click

from scatterlen_cli.commands.common import (
    DOMAIN_ERRORS, done, fail, geometry_option, load_db, load_system, run_config, spectrum_option,
)
from scatterlen_cli.core import thermo as core
from scatterlen_cli.core.symbolic import format_word
from scatterlen_cli.utils.report_writer import echo_table, write_csv


@click.group(name="thermo", help="Pressure, entropy, variance and transfer-matrix diagnostics")
def thermo():
    """Thermodynamic quantities of the length spectrum"""
    pass


@thermo.command(name="pressure", help="Pressure curve P(s f) on an s-grid")
@geometry_option
@spectrum_option
@click.option("--s-min", type=float, default=-0.5, show_default=True)
@click.option("--s-max", type=float, default=0.5, show_default=True)
@click.option("--steps", type=int, default=21, show_default=True, help="Number of grid points")
@click.pass_context
def pressure(ctx, geometry, spectrum_path, s_min, s_max, steps):
    try:
        config = run_config(ctx, geometry=geometry)
        db = load_db(config, load_system(config), spectrum_path)
        if steps < 2 or s_min >= s_max:
            raise ValueError("grid requires s-min < s-max and at least 2 steps")
        curve = core.pressure_curve(db, np.linspace(s_min, s_max, steps))
        table = [(s, value, err) for (s, value), err in zip(curve.samples, curve.errors)]
        path = write_csv(config.output_path('pressure.csv'), ['s', 'P', 'err'], table)
        echo_table(['s', 'P', 'err'], table)
        done("thermo pressure", f"n = {curve.n_used}, convex: {curve.is_convex()}; wrote {path}")
    except DOMAIN_ERRORS as e:
        fail("thermo pressure", e)


@thermo.command(name="entropy", help="Flow entropy h, the root of P(-h f) = 0")
@geometry_option
@spectrum_option
@click.pass_context
def entropy(ctx, geometry, spectrum_path):
    try:
        config = run_config(ctx, geometry=geometry)
        db = load_db(config, load_system(config), spectrum_path)
        h = core.flow_entropy(db)
        h0 = core.pressure(db, 0.0)
        table = [(db.n_max, h, h0.value, h0.extrapolation_error)]
        path = write_csv(config.output_path('entropy.csv'), ['n', 'h', 'P0', 'P0_err'], table)
        echo_table(['n', 'h', 'P(0)', 'err'], table)
        done("thermo entropy", f"h = {h:.12g}; wrote {path}")
    except DOMAIN_ERRORS as e:
        fail("thermo entropy", e)


@thermo.command(name="beta2", help="Variance beta^2 from the pressure and from orbit lengths")
@geometry_option
@spectrum_option
@click.option("--ds", type=float, default=core.DEFAULT_DS, show_default=True, help="Difference step")
@click.pass_context
def beta2(ctx, geometry, spectrum_path, ds):
    try:
        config = run_config(ctx, geometry=geometry)
        db = load_db(config, load_system(config), spectrum_path)
        estimate = core.variance_beta2(db, ds=ds)
        header = ['n', 'beta2_pressure', 'beta2_orbit', 'agreement', 'beta2_orbit_previous', 'linear_term']
        table = [(estimate.n_used, estimate.beta2_pressure, estimate.beta2_orbit, estimate.agreement,
                  estimate.beta2_orbit_previous, estimate.linear_term)]
        path = write_csv(config.output_path('beta2.csv'), header, table)
        echo_table(header, table)
        done("thermo beta2", f"beta^2 = {estimate.beta2_pressure:.8g}; wrote {path}")
    except DOMAIN_ERRORS as e:
        fail("thermo beta2", e)


@thermo.command(name="lattice", help="Gaps T_k - T_{k-1} - 4d along the (2,1)^{2k}(3,1) orbits")
@geometry_option
@click.option("--k-max", type=int, default=6, show_default=True)
@click.option("--dps", type=int, default=60, show_default=True, help="Digits of the refinement")
@click.pass_context
def lattice(ctx, geometry, k_max, dps):
    try:
        config = run_config(ctx, geometry=geometry)
        report = core.lattice_diagnostic(load_system(config), k_max, dps=dps, seed=config.seed)
        table = [(row.k, format_word(row.word), row.length, row.gap) for row in report.rows]
        path = write_csv(config.output_path('lattice.csv'), ['k', 'word', 'T', 'gap'], table)
        echo_table(['k', 'word', 'T', 'gap'], table)
        if report.failed_at is not None:
            click.echo(f"stopped at k = {report.failed_at}: {report.failure}", err=True)
        done("thermo lattice", f"d = {report.d:.12g}, delta = {report.delta:.6g}, "
                               f"R^2 = {report.r_squared:.4f}; wrote {path}")
    except DOMAIN_ERRORS as e:
        fail("thermo lattice", e)


@thermo.command(name="gapscan", help="Spectral radius of the complex-weight block transfer matrix")
@geometry_option
@click.option("--t", "t_values", type=float, multiple=True, help="Frequencies (repeatable)")
@click.option("--k", "memories", type=int, multiple=True, help="Block lengths (repeatable)")
@click.pass_context
def gapscan(ctx, geometry, t_values, memories):
    try:
        config = run_config(ctx, geometry=geometry, t_grid=list(t_values) or None, memory=list(memories) or None)
        rows = core.gap_scan(load_system(config), config.t_grid, config.memory)
        table = [(row.t, row.k, row.radius) for row in rows]
        path = write_csv(config.output_path('gapscan.csv'), ['t', 'k', 'radius'], table)
        echo_table(['t', 'k', 'radius'], table)
        done("thermo gapscan", f"{len(rows)} points; wrote {path}")
    except DOMAIN_ERRORS as e:
        fail("thermo gapscan", e)


@thermo.command(name="count", help="Orbit counting #{T <= x} against e^{hx}/(hx) and li(e^{hx})")
@geometry_option
@spectrum_option
@click.option("--points", type=int, default=10, show_default=True, help="Number of x values up to the cover")
@click.pass_context
def count(ctx, geometry, spectrum_path, points):
    try:
        config = run_config(ctx, geometry=geometry)
        system = load_system(config)
        db = load_db(config, system, spectrum_path)
        h = core.flow_entropy(db)
        cover = core.census_cover(db, system)
        x_values = np.linspace(cover / points, cover, points)
        rows = core.counting_check(db, h, x_values, cover=cover)
        header = ['x', 'count', 'reference', 'ratio', 'li_reference', 'li_ratio']
        table = [(r.x, r.count, r.reference, r.ratio, r.li_reference, r.li_ratio) for r in rows]
        path = write_csv(config.output_path('counting.csv'), header, table)
        echo_table(header, table)
        done("thermo count", f"h = {h:.8g}, cover x = {cover:.6g}; wrote {path}")
    except DOMAIN_ERRORS as e:
        fail("thermo count", e)
