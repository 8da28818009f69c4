"""Separation diagnostics of the length spectrum"""

import click
import numpy as np

from scatterlen_cli.commands.common import (
    DOMAIN_ERRORS, done, fail, geometry_option, load_db, load_system, run_config, spectrum_option,
)
from scatterlen_cli.core import separation as core
from scatterlen_cli.core.symbolic import format_word
from scatterlen_cli.core.thermo import census_cover, flow_entropy
from scatterlen_cli.utils.bump_functions import FAMILIES, make_test_function
from scatterlen_cli.utils.report_writer import echo_table, write_csv


def delta_option(func):
    return click.option("--delta", type=float, help="Window exponent (default 1.5 h)")(func)


class SeparationContext:
    """Spectrum, Pi/Xi sets, entropy and delta for one command run."""

    def __init__(self, ctx, geometry, spectrum_path, delta):
        self.config = run_config(ctx, geometry=geometry, delta=delta)
        self.system = load_system(self.config)
        self.db = load_db(self.config, self.system, spectrum_path)
        self.sets = core.build_sets(self.db)
        self.h = flow_entropy(self.db)
        self.delta = self.config.delta if self.config.delta is not None else core.default_delta(self.h)

    def x_grid(self, points):
        cover = min(census_cover(self.db, self.system), float(self.sets.Pi[-1]))
        return np.linspace(float(self.sets.Pi[0]), cover, points)

    def write(self, name, header, table):
        echo_table(header, table)
        return write_csv(self.config.output_path(name), header, table)


def points_option(func):
    return click.option("--points", type=int, default=10, show_default=True, help="Number of x values")(func)


def chi_option(func):
    return click.option("--chi", type=click.Choice(sorted(FAMILIES)), default='plateau', show_default=True)(func)


@click.group(name="separation", help="J(gamma, delta) separation scans and the weighted period sum")
def separation():
    """Separation diagnostics of the length spectrum"""
    pass


@separation.command(name="s", help="Fraction of orbits with J(gamma, delta) cap Pi = {T_gamma}")
@geometry_option
@spectrum_option
@click.option("--delta", "deltas", type=float, multiple=True, help="Window exponents (default 0, h/2, h, 1.5h, 10h)")
@click.pass_context
def check_s(ctx, geometry, spectrum_path, deltas):
    try:
        scan = SeparationContext(ctx, geometry, spectrum_path, None)
        deltas = deltas or (0.0, scan.h / 2, scan.h, 1.5 * scan.h, 10 * scan.h)
        results = [core.check_S(scan.sets, d) for d in deltas]
        path = scan.write('separation_s.csv', ['delta', 'separated', 'total', 'fraction'],
                          [(r.delta, r.separated, r.total, r.fraction) for r in results])
        done("separation s", f"h = {scan.h:.8g}; wrote {path}")
    except DOMAIN_ERRORS as e:
        fail("separation s", e)


@separation.command(name="s2", help="Separated orbits with T <= x against e^{hx/2}")
@geometry_option
@spectrum_option
@delta_option
@points_option
@click.pass_context
def check_s2(ctx, geometry, spectrum_path, delta, points):
    try:
        scan = SeparationContext(ctx, geometry, spectrum_path, delta)
        rows = core.check_S2(scan.sets, scan.delta, scan.x_grid(points), scan.h)
        path = scan.write('separation_s2.csv', ['x', 'count', 'reference', 'ratio'],
                          [(r.x, r.count, r.reference, r.ratio) for r in rows])
        done("separation s2", f"delta = {scan.delta:.6g}; wrote {path}")
    except DOMAIN_ERRORS as e:
        fail("separation s2", e)


@separation.command(name="s3", help="Even orbits whose window avoids odd lengths, against e^{hx/3}")
@geometry_option
@spectrum_option
@delta_option
@points_option
@click.pass_context
def check_s3(ctx, geometry, spectrum_path, delta, points):
    try:
        scan = SeparationContext(ctx, geometry, spectrum_path, delta)
        rows = core.check_S3(scan.sets, scan.delta, scan.x_grid(points), scan.h)
        header = ['x', 'count', 'reference', 'ratio', 'even', 'odd', 'parity_reference', 'even_or_double']
        path = scan.write('separation_s3.csv', header,
                          [(r.x, r.separated_even, r.reference, r.ratio, r.even, r.odd, r.parity_reference,
                            r.clustered_in_even_or_double) for r in rows])
        done("separation s3", f"delta = {scan.delta:.6g}; wrote {path}")
    except DOMAIN_ERRORS as e:
        fail("separation s3", e)


@separation.command(name="mlpc", help="Weighted sum over periods near each primitive length")
@geometry_option
@spectrum_option
@delta_option
@chi_option
@click.pass_context
def mlpc(ctx, geometry, spectrum_path, delta, chi):
    try:
        scan = SeparationContext(ctx, geometry, spectrum_path, delta)
        results = core.mlpc_scan(scan.sets, scan.delta, make_test_function(chi))
        table = [(format_word(r.word), r.length, r.value, len(r.contributors), r.lone) for r in results]
        path = write_csv(scan.config.output_path('mlpc.csv'), ['word', 'T', 'sum', 'contributors', 'lone'], table)
        lone = sum(r.lone for r in results)
        echo_table(['word', 'T', 'sum', 'contributors', 'lone'], table[:20], title="shortest orbits")
        done("separation mlpc", f"{lone} of {len(results)} orbits are lone contributors; wrote {path}")
    except DOMAIN_ERRORS as e:
        fail("separation mlpc", e)


@separation.command(name="ratios", help="Pairs of lengths with a near-rational ratio")
@geometry_option
@spectrum_option
@click.option("--q-max", type=int, default=50, show_default=True)
@click.option("--tol", type=float, default=1e-9, show_default=True)
@click.pass_context
def ratios(ctx, geometry, spectrum_path, q_max, tol):
    try:
        config = run_config(ctx, geometry=geometry)
        db = load_db(config, load_system(config), spectrum_path)
        flags = core.rational_independence_scan(core.build_sets(db), q_max=q_max, tol=tol)
        table = [(format_word(f.first), format_word(f.second), f.ratio, f.p, f.q, f.error) for f in flags]
        header = ['first', 'second', 'ratio', 'p', 'q', 'error']
        path = write_csv(config.output_path('ratios.csv'), header, table)
        echo_table(header, table)
        done("separation ratios", f"{len(flags)} flagged pairs; wrote {path}")
    except DOMAIN_ERRORS as e:
        fail("separation ratios", e)


@separation.command(name="cluster", help="Number of periods of Xi inside each J(gamma, delta)")
@geometry_option
@spectrum_option
@delta_option
@click.pass_context
def cluster(ctx, geometry, spectrum_path, delta):
    try:
        scan = SeparationContext(ctx, geometry, spectrum_path, delta)
        rows, a0 = core.xi_clustering(scan.sets, scan.delta)
        table = [(format_word(r.word), r.length, r.periods_in_window, r.per_length) for r in rows]
        path = write_csv(scan.config.output_path('cluster.csv'), ['word', 'T', 'periods', 'per_length'], table)
        done("separation cluster", f"A0 = {a0:.6g} at delta = {scan.delta:.6g}; wrote {path}")
    except DOMAIN_ERRORS as e:
        fail("separation cluster", e)
