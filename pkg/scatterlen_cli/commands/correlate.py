"""Pair correlations of the length spectrum"""

import math

import click
import numpy as np

from scatterlen_cli.commands.common import (
    DOMAIN_ERRORS, done, fail, geometry_option, load_db, load_system, run_config, spectrum_option,
)
from scatterlen_cli.core import correlations as core
from scatterlen_cli.core.thermo import variance_beta2
from scatterlen_cli.utils.bump_functions import FAMILIES, make_test_function, peak, plateau_width
from scatterlen_cli.utils.report_writer import echo_table, write_csv


def interval_options(func):
    func = click.option("--b", type=float, help="Upper end of the interval (default 0.5)")(func)
    func = click.option("--a", type=float, help="Lower end of the interval (default -0.5)")(func)
    return func


def _context(ctx, geometry, spectrum_path, **overrides):
    config = run_config(ctx, geometry=geometry, **overrides)
    return config, load_db(config, load_system(config), spectrum_path)


def _beta(db, beta):
    return beta if beta is not None else variance_beta2(db).beta


@click.group(name="correlate", help="Pair counts pi, omega and rho and their asymptotic comparisons")
def correlate():
    """Pair correlations of the length spectrum"""
    pass


@correlate.command(name="pi", help="pi(n, [a, b]) for n = 2..--n")
@geometry_option
@spectrum_option
@interval_options
@click.option("--n", "n_max", type=int, help="Largest word length (default: spectrum n_max)")
@click.pass_context
def pi(ctx, geometry, spectrum_path, a, b, n_max):
    try:
        config, db = _context(ctx, geometry, spectrum_path, a=a, b=b)
        n_max = n_max or db.n_max
        table = [(n, config.a, config.b, core.pair_count_pi(db, n, config.a, config.b)) for n in range(2, n_max + 1)]
        path = write_csv(config.output_path('pi.csv'), ['n', 'a', 'b', 'count'], table)
        echo_table(['n', 'a', 'b', 'count'], table)
        done("correlate pi", f"{core.PAIR_CONVENTION}; wrote {path}")
    except DOMAIN_ERRORS as e:
        fail("correlate pi", e)


@correlate.command(name="omega", help="omega(n, I_n(z)) over same-length pairs")
@geometry_option
@spectrum_option
@interval_options
@click.option("--n", type=int, required=True, help="Word length")
@click.option("--z", "z_values", type=float, multiple=True, help="Window centres (repeatable, default 0)")
@click.option("--eps", type=float, default=1.0, show_default=True, help="Window scale eps_n")
@click.pass_context
def omega(ctx, geometry, spectrum_path, a, b, n, z_values, eps):
    try:
        config, db = _context(ctx, geometry, spectrum_path, a=a, b=b)
        table = [(n, z, eps, core.window_count_omega(db, n, z, eps, config.a, config.b)) for z in (z_values or (0.0,))]
        path = write_csv(config.output_path('omega.csv'), ['n', 'z', 'eps', 'count'], table)
        echo_table(['n', 'z', 'eps', 'count'], table)
        done("correlate omega", f"wrote {path}")
    except DOMAIN_ERRORS as e:
        fail("correlate omega", e)


@correlate.command(name="rho", help="Smoothed correlation rho_N(chi)")
@geometry_option
@spectrum_option
@click.option("--n", "n_max", type=int, help="Largest word length (default: spectrum n_max)")
@click.option("--chi", type=click.Choice(sorted(FAMILIES)), default='plateau', show_default=True)
@click.option("--scale", type=float, default=1.0, show_default=True, help="Support half-width of chi")
@click.pass_context
def rho(ctx, geometry, spectrum_path, n_max, chi, scale):
    try:
        config, db = _context(ctx, geometry, spectrum_path)
        n_max = n_max or db.n_max
        function = make_test_function(chi, scale=scale)
        table = [(n, chi, scale, core.smoothed_correlation_rho(db, n, function)) for n in range(2, n_max + 1)]
        path = write_csv(config.output_path('rho.csv'), ['n', 'chi', 'scale', 'rho'], table)
        echo_table(['n', 'chi', 'scale', 'rho'], table)
        done("correlate rho", f"chi(0) = {peak(function):.4g}, plateau |t| <= {plateau_width(function):.4g}; "
                              f"wrote {path}")
    except DOMAIN_ERRORS as e:
        fail("correlate rho", e)


@correlate.command(name="theorem1", help="pi(n, [a, b]) against its Gaussian asymptotic")
@geometry_option
@spectrum_option
@interval_options
@click.option("--n-min", type=int, default=8, show_default=True)
@click.option("--beta", type=float, help="Variance root beta (default: estimated from the spectrum)")
@click.pass_context
def theorem1(ctx, geometry, spectrum_path, a, b, n_min, beta):
    try:
        config, db = _context(ctx, geometry, spectrum_path, a=a, b=b)
        beta = _beta(db, beta)
        reports = core.theorem1_report(db, config.a, config.b, beta, range(min(n_min, db.n_max), db.n_max + 1))
        header = ['n', 'a', 'b', 'count', 'predicted', 'ratio']
        table = [(r.n, r.a, r.b, r.count, r.predicted, r.ratio) for r in reports]
        path = write_csv(config.output_path('theorem1.csv'), header, table)
        echo_table(header, table)
        done("correlate theorem1", f"beta = {beta:.8g}, {core.PAIR_CONVENTION}; wrote {path}")
    except DOMAIN_ERRORS as e:
        fail("correlate theorem1", e)


@correlate.command(name="theorem2", help="Shrinking-window counts against the Gaussian profile in z")
@geometry_option
@spectrum_option
@interval_options
@click.option("--n", type=int, help="Word length (default: spectrum n_max)")
@click.option("--eps-rule", help="eps_n rule: power:p, exp:c or const:e (default power:2)")
@click.option("--z-points", type=int, default=25, show_default=True, help="Grid size over +-3 beta sqrt(n)")
@click.option("--beta", type=float, help="Variance root beta (default: estimated from the spectrum)")
@click.pass_context
def theorem2(ctx, geometry, spectrum_path, a, b, n, eps_rule, z_points, beta):
    try:
        config, db = _context(ctx, geometry, spectrum_path, a=a, b=b, eps_rule=eps_rule)
        n = n or db.n_max
        beta = _beta(db, beta)
        z_grid = config.z_grid
        if z_grid is None:
            spread = 3.0 * beta * math.sqrt(n)
            z_grid = np.linspace(-spread, spread, z_points)
        report = core.theorem2_report(db, config.a, config.b, beta, core.parse_eps_rule(config.eps_rule), z_grid, n)
        header = ['z', 'pi_count', 'omega_count', 'normalized', 'profile', 'deviation']
        table = [(r.z, r.pi_count, r.omega_count, r.normalized, r.profile, r.deviation) for r in report.rows]
        path = write_csv(config.output_path('theorem2.csv'), header, table)
        echo_table(header, table)
        ks = core.gaussian_ks(db, n, beta)
        done("correlate theorem2", f"n = {n}, eps_n = {report.eps:.4g}, sup deviation = {report.sup_deviation:.4g}, "
                                   f"profile R^2 = {report.profile_r_squared:.4f}, KS = {ks:.4f}; wrote {path}")
    except DOMAIN_ERRORS as e:
        fail("correlate theorem2", e)
