"""Build and persist the primitive length spectrum"""

import os

import click

from scatterlen_cli.commands.common import DOMAIN_ERRORS, done, fail, geometry_option, load_system, run_config
from scatterlen_cli.core.store import build_spectrum, load_spectrum, save_spectrum
from scatterlen_cli.utils.errors import SpectrumFormatError
from scatterlen_cli.utils.logger import log_command
from scatterlen_cli.utils.report_writer import echo_table


@click.command(
    name="spectrum",
    help="Solve every primitive necklace up to --n and write spectrum.csv",
    short_help="Build the length spectrum"
)
@geometry_option
@click.option("--n", "n_max", type=int, help="Largest period (default from run config)")
@click.option("--tol", type=float, help="Solver tolerance on |grad L| (default 1e-12)")
@click.option("--fresh", is_flag=True, help="Ignore an existing spectrum file instead of extending it")
@click.pass_context
def spectrum(ctx, geometry, n_max, tol, fresh):
    """Build and persist the primitive length spectrum"""
    try:
        config = run_config(ctx, geometry=geometry, n_max=n_max, tol=tol)
        system = load_system(config)
        existing = None
        if not fresh and os.path.exists(config.spectrum_path):
            try:
                existing = load_spectrum(config.spectrum_path, system)
            except SpectrumFormatError as e:
                log_command("spectrum", f"not reusing {config.spectrum_path}: {e}")
        log_command("spectrum", f"building n <= {config.n_max} with {config.threads} worker(s)")
        db = build_spectrum(system, config.n_max, threads=config.threads, tol=config.tol, seed=config.seed,
                            existing=existing, progress=not config.quiet)
        path = save_spectrum(db, config.spectrum_path)
        table = []
        for m in range(2, config.n_max + 1):
            lengths = db.lengths_at(m)
            table.append((m, len(lengths), float(lengths.min()), float(lengths.max())))
        echo_table(['m', 'orbits', 'T_min', 'T_max'], table)
        done("spectrum", f"{len(db)} primitive orbits written to {path}")
    except DOMAIN_ERRORS as e:
        fail("spectrum", e)
