import math

import numpy as np
import pytest

from scatterlen_cli.core import correlations
from scatterlen_cli.core.symbolic import prime_cycle_count
from scatterlen_cli.core.thermo import variance_beta2
from scatterlen_cli.utils.bump_functions import AutocorrelationBump, BumpFunction, PlateauBump

TOL = correlations.TIE_TOL


def brute_count(x, y, lo, hi):
    return sum(1 for xi in x for yj in y if lo - TOL <= xi - yj <= hi + TOL)


def brute_rho(lengths, chi):
    return math.fsum(float(chi(ti - tj)) for ti in lengths for tj in lengths)


def test_pi_matches_brute_force(default_db):
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = int(rng.integers(2, 8))
        a = float(rng.uniform(-6, 3))
        b = a + float(rng.uniform(0.01, 6))
        lengths = default_db.lengths_upto(n)
        assert correlations.pair_count_pi(default_db, n, a, b) == brute_count(lengths, lengths, a, b)


def test_omega_matches_brute_force(default_db):
    rng = np.random.default_rng(1)
    for _ in range(20):
        n = int(rng.integers(2, 8))
        z = float(rng.uniform(-3, 3))
        eps = float(rng.uniform(0.05, 2))
        a = float(rng.uniform(-2, 1))
        b = a + float(rng.uniform(0.01, 2))
        lengths = default_db.lengths_at(n)
        expected = brute_count(lengths, lengths, z + eps * a, z + eps * b)
        assert correlations.window_count_omega(default_db, n, z, eps, a, b) == expected


def test_rho_matches_brute_force(default_db):
    rng = np.random.default_rng(2)
    for _ in range(20):
        n = int(rng.integers(2, 8))
        scale = float(rng.uniform(0.1, 3))
        chi = PlateauBump(plateau=float(rng.uniform(0, 0.9)), scale=scale)
        lengths = default_db.lengths_upto(n)
        assert correlations.smoothed_correlation_rho(default_db, n, chi) == pytest.approx(
            brute_rho(lengths, chi), rel=1e-12, abs=1e-12)


def test_full_window_counts_all_pairs(default_db):
    m = len(default_db.lengths_upto(6))
    assert correlations.pair_count_pi(default_db, 6, -1e3, 1e3) == m * m
    c6 = prime_cycle_count(3, 6)
    assert correlations.window_count_omega(default_db, 6, 0.0, 1.0, -1e3, 1e3) == c6 * c6
    assert correlations.window_count_omega(default_db, 6, 1e4, 1.0, -1.0, 1.0) == 0


def test_pi_swap_symmetry_and_monotonicity(default_db):
    assert correlations.pair_count_pi(default_db, 7, 0.3, 2.1) == correlations.pair_count_pi(default_db, 7, -2.1, -0.3)
    inner = correlations.pair_count_pi(default_db, 7, -0.5, 0.5)
    outer = correlations.pair_count_pi(default_db, 7, -1.0, 1.0)
    assert inner <= outer


def test_pi_includes_diagonal(default_db):
    m = len(default_db.lengths_upto(5))
    assert correlations.pair_count_pi(default_db, 5, -1e-9, 1e-9) >= m


def test_interval_must_be_ordered(default_db):
    with pytest.raises(ValueError, match="interval requires a < b"):
        correlations.pair_count_pi(default_db, 4, 1.0, 0.0)
    with pytest.raises(ValueError, match="interval requires a < b"):
        correlations.window_count_omega(default_db, 4, 0.0, 1.0, 0.5, 0.5)


def test_rho_linearity_and_sandwich(default_db):
    chi = PlateauBump(plateau=0.25, scale=1.0)
    rho = correlations.smoothed_correlation_rho(default_db, 6, chi)
    assert correlations.smoothed_correlation_rho(default_db, 6, chi.scaled(2.0)) == pytest.approx(2 * rho)
    low = correlations.pair_count_pi(default_db, 6, -0.25, 0.25)
    high = correlations.pair_count_pi(default_db, 6, -1.0, 1.0)
    assert low <= rho <= high


def test_rho_with_autocorrelation_bump(default_db):
    chi = AutocorrelationBump(scale=2.0)
    lengths = default_db.lengths_upto(5)
    assert correlations.smoothed_correlation_rho(default_db, 5, chi) == pytest.approx(
        brute_rho(lengths, chi), rel=1e-12)


def test_rho_rejects_negative_functions(default_db):
    class Dip(BumpFunction):
        def _profile(self, u):
            return np.cos(3.0 * u)

    with pytest.raises(ValueError, match="negative"):
        correlations.smoothed_correlation_rho(default_db, 4, Dip())


def test_theorem1_prediction_for_three_disks():
    beta = 0.7
    for n in (8, 10):
        expected = 1.0 * 4.0 / (math.sqrt(2 * math.pi) * beta) * 4.0 ** n / n ** 2.5
        assert correlations.predicted_pi(n, -0.5, 0.5, beta, math.log(2)) == pytest.approx(expected, rel=1e-12)


def test_theorem1_report(default_db):
    reports = correlations.theorem1_report(default_db, -0.5, 0.5, 0.8, range(4, 9))
    assert [r.n for r in reports] == [4, 5, 6, 7, 8]
    assert all(r.count == correlations.pair_count_pi(default_db, r.n, -0.5, 0.5) for r in reports)
    assert all(r.ratio == pytest.approx(r.count / r.predicted) for r in reports)


def test_theorem1_empty_interval_counts_ties(default_db):
    reports = correlations.theorem1_report(default_db, 0.0, 0.0, 0.8, [5])
    assert reports[0].predicted == 0.0
    # time-reversed cycles share a length
    lengths = default_db.lengths_upto(5)
    assert reports[0].count == brute_count(lengths, lengths, 0.0, 0.0)
    assert reports[0].count > len(lengths)


def test_eps_rules():
    h0 = math.log(2)
    power = correlations.parse_eps_rule("power:2")
    assert power(14) == pytest.approx(14.0 ** -2)
    correlations.check_subexponential(power(14), 14, h0)
    with pytest.raises(ValueError, match="open problem"):
        correlations.check_subexponential(correlations.parse_eps_rule("exp:1")(14), 14, h0)
    with pytest.raises(ValueError):
        correlations.parse_eps_rule("linear")


def test_theorem2_report(default_db):
    beta = variance_beta2(default_db).beta
    z_grid = np.linspace(-3 * beta * math.sqrt(8), 3 * beta * math.sqrt(8), 11)
    report = correlations.theorem2_report(default_db, -0.5, 0.5, beta, correlations.parse_eps_rule("const:1"),
                                          z_grid, 8)
    assert len(report.rows) == 11
    centre = report.rows[5]
    assert centre.z == pytest.approx(0.0, abs=1e-12)
    assert centre.pi_count == correlations.pair_count_pi(default_db, 8, -0.5, 0.5)
    assert centre.omega_count == correlations.window_count_omega(default_db, 8, 0.0, 1.0, -0.5, 0.5)
    assert report.sup_deviation >= 0


def test_profile_fit_of_exact_gaussian():
    z = np.linspace(-4, 4, 21)
    counts = 7.0 * np.exp(-z ** 2 / (2 * 0.5 * 3))
    assert correlations.profile_fit(z, counts, math.sqrt(0.5), 3) == pytest.approx(1.0)


def test_gaussian_ks_is_a_distance(default_db):
    beta = variance_beta2(default_db).beta
    ks = correlations.gaussian_ks(default_db, 8, beta)
    assert 0.0 <= ks <= 1.0
    assert len(correlations.same_length_differences(default_db, 8)) == 30 * 29


@pytest.mark.slow
def test_theorem1_ratios_at_twelve(large_db):
    beta = variance_beta2(large_db).beta
    reports = correlations.theorem1_report(large_db, -0.5, 0.5, beta, range(9, 13))
    assert all(0.4 < r.ratio < 2.5 for r in reports)


@pytest.mark.slow
def test_same_length_differences_are_gaussian_at_fourteen(deep_db):
    beta = variance_beta2(deep_db).beta
    assert correlations.gaussian_ks(deep_db, 14, beta) < 0.08
