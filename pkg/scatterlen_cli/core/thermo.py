"""Pressure, flow entropy, variance and transfer-matrix diagnostics from the length spectrum"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg
from scipy.optimize import brentq
from scipy.special import expi, logsumexp
from scipy.stats import linregress

from scatterlen_cli.core.geometry import ObstacleSystem
from scatterlen_cli.core.orbit_solver import refine_cycle_mp, solve_cycle, solve_open_path
from scatterlen_cli.core.store import SpectrumDB
from scatterlen_cli.core.symbolic import Word, divisors, map_entropy
from scatterlen_cli.utils.errors import ScatterlenError, SpectrumError
from scatterlen_cli.utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_DS = 1e-2
CONVEXITY_TOL = 1e-6
MAX_BLOCK_STATES = 20000
DENSE_EIG_LIMIT = 1500
MIN_PRESSURE_PERIOD = 8


@dataclass(frozen=True)
class PressureEstimate:
    s: float
    value: float
    extrapolation_error: float
    n_used: int


@dataclass
class PressureCurve:
    samples: List[Tuple[float, float]]
    n_used: int
    errors: List[float] = field(default_factory=list)

    @property
    def extrapolation_error(self):
        return max(self.errors) if self.errors else 0.0

    def second_differences(self):
        s = np.array([p[0] for p in self.samples])
        v = np.array([p[1] for p in self.samples])
        if len(s) < 3:
            return np.array([])
        # divided second differences, valid on non-uniform grids
        left = (v[1:-1] - v[:-2]) / (s[1:-1] - s[:-2])
        right = (v[2:] - v[1:-1]) / (s[2:] - s[1:-1])
        return 2.0 * (right - left) / (s[2:] - s[:-2])

    def is_convex(self, tol=CONVEXITY_TOL):
        return bool(np.all(self.second_differences() >= -tol))


@dataclass(frozen=True)
class VarianceEstimate:
    beta2_pressure: float
    beta2_orbit: float
    beta2_orbit_previous: float
    linear_term: float
    n_used: int

    @property
    def agreement(self):
        """Relative difference of the two estimators."""
        return abs(self.beta2_pressure - self.beta2_orbit) / max(abs(self.beta2_pressure), abs(self.beta2_orbit))

    @property
    def stability(self):
        """Relative change of the orbit estimator between n_used - 2 and n_used."""
        return abs(self.beta2_orbit - self.beta2_orbit_previous) / abs(self.beta2_orbit)

    @property
    def beta(self):
        return math.sqrt(self.beta2_pressure)


@dataclass(frozen=True)
class LatticeRow:
    k: int
    word: Word
    length: float
    gap: Optional[float]


@dataclass
class LatticeReport:
    d: float
    rows: List[LatticeRow]
    delta: float = math.nan
    r_squared: float = math.nan
    failed_at: Optional[int] = None
    failure: str = ''


@dataclass(frozen=True)
class GapScanRow:
    t: float
    k: int
    radius: float


@dataclass(frozen=True)
class CountingRow:
    x: float
    count: int
    reference: float
    li_reference: float

    @property
    def ratio(self):
        return self.count / self.reference

    @property
    def li_ratio(self):
        return self.count / self.li_reference


def _period_points(db: SpectrumDB, n: int):
    """Multiplicities and f_n values of all period-n points, grouped by primitive orbit."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    missing = [m for m in divisors(n) if m >= 2 and m > db.n_max]
    if missing:
        raise SpectrumError(
            f"Spectrum complete to |gamma| <= {db.n_max}; period {n} needs divisors {missing}"
        )
    weights, values = [], []
    for m in divisors(n):
        lengths = db.lengths_at(m)
        weights.append(np.full(len(lengths), float(m)))
        values.append((n // m) * lengths)
    return np.concatenate(weights), np.concatenate(values)


def log_partition_sum(db: SpectrumDB, n: int, s: float) -> float:
    """log of sum over sigma^n x = x of e^{s f_n(x)}; -inf when there are no period-n points."""
    weights, values = _period_points(db, n)
    if len(values) == 0:
        return -math.inf
    return float(logsumexp(s * values, b=weights))


def partition_sum(db: SpectrumDB, n: int, s: float):
    """
    Periodic-point partition sum Z_n(s) = sum over sigma^n x = x of e^{s f_n(x)}.

    Each primitive necklace of period m | n contributes m points with
    f_n = (n / m) T. At s = 0 the exact integer count trace(A^n) is returned.

    Raises:
        SpectrumError: the spectrum misses a divisor period of n
    """
    weights, values = _period_points(db, n)
    if s == 0:
        return int(round(weights.sum()))
    return math.exp(log_partition_sum(db, n, s))


def _ratio_estimate(db, n, s):
    return log_partition_sum(db, n, s) - log_partition_sum(db, n - 1, s)


def _pressure_period(db, n_max):
    n = db.n_max if n_max is None else n_max
    db.require(n)
    if n < MIN_PRESSURE_PERIOD:
        raise SpectrumError(f"Pressure needs a spectrum to n_max >= {MIN_PRESSURE_PERIOD}, got {n}")
    return n


def pressure(db: SpectrumDB, s: float, n_max: Optional[int] = None) -> PressureEstimate:
    """
    Topological pressure P(s f) by the ratio log(Z_n(s) / Z_{n-1}(s)).

    Args:
        db: spectrum
        s (float): multiplier of the roof function
        n_max (int): period used (defaults to the spectrum's n_max)

    Returns:
        PressureEstimate with extrapolation_error = |estimate(n) - estimate(n-1)|
    """
    n = _pressure_period(db, n_max)
    value = _ratio_estimate(db, n, s)
    previous = _ratio_estimate(db, n - 1, s)
    return PressureEstimate(s=s, value=value, extrapolation_error=abs(value - previous), n_used=n)


def pressure_curve(db: SpectrumDB, s_values: Sequence[float], n_max: Optional[int] = None) -> PressureCurve:
    n = _pressure_period(db, n_max)
    estimates = [pressure(db, float(s), n) for s in sorted(s_values)]
    curve = PressureCurve(samples=[(e.s, e.value) for e in estimates], n_used=n,
                          errors=[e.extrapolation_error for e in estimates])
    if not curve.is_convex():
        logger.warning("pressure curve is not convex at n = %d (min second difference %.3g)",
                       n, float(np.min(curve.second_differences())))
    return curve


def product_pressure(db: SpectrumDB, s: float, n_max: Optional[int] = None) -> PressureEstimate:
    """
    Pressure of s F on the product shift, F(x, y) = f(x) - f(y).

    Evaluated from the pair partition sum over (x, y) with
    sigma^n x = x, sigma^n y = y, independently of pressure().
    """
    n = _pressure_period(db, n_max)

    def log_pairs(period):
        weights, values = _period_points(db, period)
        exponents = s * (values[:, None] - values[None, :])
        return float(logsumexp(exponents, b=weights[:, None] * weights[None, :]))

    value = log_pairs(n) - log_pairs(n - 1)
    previous = log_pairs(n - 1) - log_pairs(n - 2)
    return PressureEstimate(s=s, value=value, extrapolation_error=abs(value - previous), n_used=n)


def additivity_check(db: SpectrumDB, s: float, n_max: Optional[int] = None) -> Tuple[float, float, float]:
    """
    Compare P(s F) with P(s f) + P(-s f).

    Returns:
        tuple: (product side, sum of one-sided pressures, tolerance of twice
        the combined extrapolation error)
    """
    product = product_pressure(db, s, n_max)
    plus, minus = pressure(db, s, n_max), pressure(db, -s, n_max)
    tolerance = 2.0 * (product.extrapolation_error + plus.extrapolation_error + minus.extrapolation_error)
    return product.value, plus.value + minus.value, tolerance


def flow_entropy(db: SpectrumDB, n_max: Optional[int] = None, xtol=1e-12) -> float:
    """
    Topological entropy h of the flow: the root of s -> P(-s f).

    Raises:
        SpectrumError: no sign change found
    """
    n = _pressure_period(db, n_max)
    at_zero = pressure(db, 0.0, n).value
    if at_zero <= 0:
        raise SpectrumError(f"P(0) = {at_zero:.6g} is not positive; cannot bracket the entropy")
    hi = 1.0
    for _ in range(60):
        if pressure(db, -hi, n).value < 0:
            break
        hi *= 2.0
    else:
        raise SpectrumError("Could not bracket the root of P(-s f)")
    h = brentq(lambda s: pressure(db, -s, n).value, 0.0, hi, xtol=xtol)
    logger.info("flow entropy h = %.12g from n = %d", h, n)
    return h


def _second_difference(db, n, ds):
    return (pressure(db, ds, n).value - 2.0 * pressure(db, 0.0, n).value + pressure(db, -ds, n).value) / ds ** 2


def orbit_variance(db: SpectrumDB, n: int) -> float:
    """Var(f_n(x) - f_n(y)) / n over pairs of period-n points, i.e. 2 Var(f_n) / n."""
    weights, values = _period_points(db, n)
    mean = np.average(values, weights=weights)
    variance = np.average((values - mean) ** 2, weights=weights)
    return 2.0 * float(variance) / n


def variance_beta2(db: SpectrumDB, n_max: Optional[int] = None, ds=DEFAULT_DS) -> VarianceEstimate:
    """
    Two estimates of beta^2 = d^2/ds^2 P(s F) at s = 0.

    beta2_pressure uses the product-shift identity P(s F) = P(s f) + P(-s f),
    so beta^2 = 2 P''(0), with central differences at ds and ds / 2 combined
    by one Richardson step. beta2_orbit is the variance of length differences
    of period-n points divided by n.

    Args:
        db: spectrum
        n_max (int): period used (defaults to the spectrum's n_max)
        ds (float): difference step

    Returns:
        VarianceEstimate
    """
    n = _pressure_period(db, n_max)
    if ds <= 0:
        raise ValueError(f"ds must be positive, got {ds}")
    coarse = _second_difference(db, n, ds)
    fine = _second_difference(db, n, ds / 2.0)
    second = (4.0 * fine - coarse) / 3.0
    if abs(fine - coarse) > 0.05 * abs(second):
        logger.warning("pressure curvature not resolved at ds = %g (%.6g vs %.6g)", ds, coarse, fine)
    linear = (product_pressure(db, ds, n).value - product_pressure(db, -ds, n).value) / (2.0 * ds)
    estimate = VarianceEstimate(
        beta2_pressure=2.0 * second,
        beta2_orbit=orbit_variance(db, n),
        beta2_orbit_previous=orbit_variance(db, n - 2),
        linear_term=linear,
        n_used=n,
    )
    logger.info("beta^2: pressure %.6g, orbit %.6g (n = %d)", estimate.beta2_pressure, estimate.beta2_orbit, n)
    return estimate


def lattice_word(k: int) -> Word:
    """(2, 1) repeated 2k times followed by (3, 1): 4k + 2 reflections."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return (2, 1) * (2 * k) + (3, 1)


def lattice_diagnostic(system: ObstacleSystem, k_max: int, dps: int = 60, seed: int = 0) -> LatticeReport:
    """
    Gaps T_k - T_{k-1} - 4d along the orbits of lattice_word(k).

    Each added (2, 1)(2, 1) block runs twice more along the shortest link
    between K_1 and K_2, so the gaps measure how fast the orbits converge to
    that 2-cycle. Lengths are refined in ``dps``-digit arithmetic because the
    gaps fall below double precision after a few steps. A fit
    log gap_k = const + 2k log(delta) gives delta.

    Args:
        system: obstacle system with at least three disks
        k_max (int): largest k (>= 2)
        dps (int): working precision of the refinement
        seed (int): multi-start seed

    Returns:
        LatticeReport; on a solver failure the rows computed so far, with
        ``failed_at`` and ``failure`` set
    """
    if k_max < 2:
        raise ValueError(f"k_max must be >= 2, got {k_max}")
    with mpmath.workdps(dps):
        a, b = system.disk(1), system.disk(2)
        d = mpmath.sqrt((mpmath.mpf(a.center[0]) - b.center[0]) ** 2 + (mpmath.mpf(a.center[1]) - b.center[1]) ** 2)
        d = d - a.radius - b.radius
        report = LatticeReport(d=float(d), rows=[])
        previous = None
        for k in range(1, k_max + 1):
            word = lattice_word(k)
            try:
                orbit = solve_cycle(system, word, seed=seed)
                length = refine_cycle_mp(system, orbit, dps=dps).length
            except ScatterlenError as e:
                logger.warning("lattice diagnostic stopped at k = %d: %s", k, e)
                report.failed_at, report.failure = k, str(e)
                break
            gap = None if previous is None else float(length - previous - 4 * d)
            report.rows.append(LatticeRow(k=k, word=word, length=float(length), gap=gap))
            previous = length

    gaps = [(row.k, row.gap) for row in report.rows if row.gap is not None and row.gap > 0]
    if len(gaps) >= 2:
        fit = linregress([k for k, _ in gaps], [math.log(g) for _, g in gaps])
        report.delta = math.exp(fit.slope / 2.0)
        report.r_squared = fit.rvalue ** 2
    return report


def admissible_blocks(kappa: int, k: int) -> List[Word]:
    """Linearly admissible words of length k in lexicographic order."""
    return [w for w in itertools.product(range(1, kappa + 1), repeat=k)
            if all(x != y for x, y in zip(w, w[1:]))]


def block_weights(system: ObstacleSystem, k: int) -> Dict[Word, float]:
    """
    Finite-memory roof function on k-blocks.

    f(block) is the length of the middle flight of the stationary open
    trajectory through the block's obstacles (flight k//2 - 1 -> k//2).

    Raises:
        ValueError: k < 2 or too many states
    """
    if k < 2:
        raise ValueError(f"Block memory must be >= 2, got {k}")
    states = system.kappa * (system.kappa - 1) ** (k - 1)
    if states > MAX_BLOCK_STATES:
        raise ValueError(f"Memory {k} gives {states} block states (limit {MAX_BLOCK_STATES})")
    middle = k // 2 - 1
    weights = {}
    for block in admissible_blocks(system.kappa, k):
        path = solve_open_path(system, block)
        weights[block] = float(path.segment_lengths[middle])
    return weights


def _transition_structure(blocks, kappa):
    index = {block: i for i, block in enumerate(blocks)}
    rows, cols = [], []
    for i, block in enumerate(blocks):
        for j in range(1, kappa + 1):
            successor = block[1:] + (j,)
            if j != block[-1]:
                rows.append(i)
                cols.append(index[successor])
    return np.array(rows), np.array(cols)


def complex_spectral_radius(system: ObstacleSystem, t: float, memory: int,
                            weights: Optional[Dict[Word, float]] = None) -> float:
    """
    Spectral radius of the k-block transfer matrix with entries e^{i t f(block) - h0}.

    Args:
        system: obstacle system
        t (float): frequency
        memory (int): block length k
        weights: precomputed block_weights(system, memory)

    Returns:
        float: 1 at t = 0; below 1 when the weights are not cohomologous to
        a lattice-valued function
    """
    if weights is None:
        weights = block_weights(system, memory)
    blocks = sorted(weights)
    rows, cols = _transition_structure(blocks, system.kappa)
    f = np.array([weights[b] for b in blocks])
    entries = np.exp(1j * t * f[rows] - map_entropy(system.kappa))
    dimension = len(blocks)
    matrix = scipy.sparse.csr_matrix((entries, (rows, cols)), shape=(dimension, dimension))
    if dimension <= DENSE_EIG_LIMIT:
        eigenvalues = scipy.linalg.eigvals(matrix.toarray())
    else:
        eigenvalues = scipy.sparse.linalg.eigs(matrix, k=4, which='LM', return_eigenvectors=False, tol=1e-12)
    return float(np.max(np.abs(eigenvalues)))


def gap_scan(system: ObstacleSystem, t_values: Sequence[float], memories: Sequence[int]) -> List[GapScanRow]:
    """complex_spectral_radius over a (t, k) grid, solving each k's open paths once."""
    rows = []
    for k in memories:
        weights = block_weights(system, k)
        logger.info("block weights for k = %d: %d states", k, len(weights))
        for t in t_values:
            rows.append(GapScanRow(t=float(t), k=k, radius=complex_spectral_radius(system, t, k, weights)))
    return rows


def census_cover(db: SpectrumDB, system: ObstacleSystem) -> float:
    """
    Largest x below which the census holds every primitive orbit with T <= x.

    An orbit with more than n_max reflections has at least n_max + 1 flights,
    each no shorter than the smallest gap between disks.
    """
    if db.geometry_hash != system.geometry_hash():
        raise SpectrumError("Spectrum and geometry do not match")
    return (db.n_max + 1) * system.min_gap


def counting_check(db: SpectrumDB, h: float, x_values: Sequence[float],
                   cover: Optional[float] = None) -> List[CountingRow]:
    """
    #{gamma: T_gamma <= x} against e^{hx}/(hx) and li(e^{hx}) = Ei(hx).

    Args:
        db: spectrum
        h (float): flow entropy
        x_values: lengths to test
        cover (float): census_cover value; larger x are rejected

    Raises:
        SpectrumError: some x exceeds the cover
    """
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    lengths = np.sort(db.lengths_upto(db.n_max))
    rows = []
    for x in x_values:
        if cover is not None and x > cover:
            raise SpectrumError(f"x = {x:.6g} exceeds the census cover {cover:.6g}")
        count = int(np.searchsorted(lengths, x, side='right'))
        rows.append(CountingRow(x=float(x), count=count, reference=math.exp(h * x) / (h * x),
                                li_reference=float(expi(h * x))))
    return rows
