"""Helpers shared by the commands"""

import os

import click

from scatterlen_cli.core.geometry import default_system, load_geometry
from scatterlen_cli.core.store import load_spectrum
from scatterlen_cli.utils.errors import ScatterlenError, SpectrumFormatError
from scatterlen_cli.utils.logger import log_command
from scatterlen_cli.utils.run_config import RunConfig

DOMAIN_ERRORS = (ScatterlenError, ValueError)


def geometry_option(func):
    return click.option(
        "--config", "-c", "geometry",
        type=click.Path(),
        help="Geometry JSON file (default: built-in asymmetric three-disk system)"
    )(func)


def spectrum_option(func):
    return click.option(
        "--spectrum", "spectrum_path",
        type=click.Path(),
        help="Spectrum file (default: <output-dir>/spectrum.csv)"
    )(func)


def run_config(ctx, **overrides) -> RunConfig:
    """The group's RunConfig with this command's flags applied."""
    base = ctx.obj if isinstance(ctx.obj, RunConfig) else RunConfig()
    return base.with_overrides(**overrides)


def load_system(config: RunConfig):
    if config.geometry:
        return load_geometry(config.geometry)
    return default_system()


def load_db(config: RunConfig, system, spectrum_path=None):
    path = spectrum_path or config.spectrum_path
    if not os.path.exists(path):
        raise SpectrumFormatError(f"Spectrum file not found: {path} (run `scatterlen spectrum` first)")
    return load_spectrum(path, system)


def fail(command_name, error):
    """Report a domain error on stderr and in the log, then exit with code 1."""
    message = f"Error: {error}"
    click.echo(message, err=True)
    log_command(command_name, message)
    raise SystemExit(1)


def done(command_name, message):
    click.echo(message)
    log_command(command_name, message)
