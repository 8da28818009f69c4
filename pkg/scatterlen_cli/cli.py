"""Scatterlen CLI"""

import click

from scatterlen_cli import __version__
from scatterlen_cli.commands.common import fail
from scatterlen_cli.commands.correlate import correlate
from scatterlen_cli.commands.enumerate import enumerate_cycles
from scatterlen_cli.commands.separation import separation
from scatterlen_cli.commands.spectrum import spectrum
from scatterlen_cli.commands.thermo import thermo
from scatterlen_cli.commands.validate import validate
from scatterlen_cli.utils.errors import ConfigurationError
from scatterlen_cli.utils.logger import configure_logging
from scatterlen_cli.utils.run_config import RunConfig, load_run_config


@click.group()
@click.version_option(__version__, prog_name="scatterlen")
@click.option("--run-config", "-r", type=click.Path(), help="YAML run configuration")
@click.option("--output-dir", "-o", type=click.Path(), help="Directory for reports (env: SCATTERLEN_OUTPUT_DIR)")
@click.option("--threads", "-j", type=int, help="Worker processes for spectrum builds")
@click.option("--seed", type=int, help="Seed for multi-start jitter and sampling (default 0)")
@click.option("--quiet", "-q", is_flag=True, default=None, help="No progress bars")
@click.pass_context
def cli(ctx, run_config, output_dir, threads, seed, quiet):
    """Scatterlen: length spectrum of open billiards"""
    try:
        config = load_run_config(run_config) if run_config else RunConfig()
        config = config.with_overrides(output_dir=output_dir, threads=threads, seed=seed, quiet=quiet)
    except ConfigurationError as e:
        fail("scatterlen", e)
    configure_logging(config.log_dir)
    ctx.obj = config


# Add commands to the CLI group
cli.add_command(validate)
cli.add_command(enumerate_cycles)
cli.add_command(spectrum)
cli.add_command(thermo)
cli.add_command(correlate)
cli.add_command(separation)

if __name__ == '__main__':
    cli()
