"""Separation of lengths: J(gamma, delta) intervals, (S)-type scans and the weighted sum over periods"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from scatterlen_cli.core.linearization import det_factor_from_lambda
from scatterlen_cli.core.store import SpectrumDB, SpectrumRow
from scatterlen_cli.core.symbolic import Word, format_word, reversed_necklace
from scatterlen_cli.utils.bump_functions import BumpFunction
from scatterlen_cli.utils.errors import SpectrumError
from scatterlen_cli.utils.logger import get_logger

logger = get_logger(__name__)

TIE_TOL = 1e-12
DEFAULT_DELTA_FACTOR = 1.5


@dataclass(frozen=True)
class PeriodicRay:
    """A primitive orbit or one of its iterates; period d = k T."""
    primitive: SpectrumRow
    k: int

    @property
    def period(self):
        return self.k * self.primitive.length

    @property
    def reflections(self):
        return self.k * self.primitive.m

    @property
    def det_factor(self):
        if self.k == 1:
            return self.primitive.det_factor
        # dispersing reflections make every monodromy entry positive, so the trace exceeds 2
        return det_factor_from_lambda(self.primitive.lambda_u, self.k)


@dataclass
class SpectrumSets:
    """
    Pi: primitive lengths; Xi: periods of all rays with period <= cutoff.

    Both are sorted. ``primitive`` and ``rays`` hold the orbits behind the
    values in the same order.
    """
    primitive: List[SpectrumRow]
    rays: List[PeriodicRay]
    cutoff: float
    Pi: np.ndarray = field(init=False)
    Xi: np.ndarray = field(init=False)
    even: np.ndarray = field(init=False)

    def __post_init__(self):
        self.Pi = np.array([row.length for row in self.primitive], dtype=float)
        self.Xi = np.array([ray.period for ray in self.rays], dtype=float)
        self.even = np.array([row.m % 2 == 0 for row in self.primitive], dtype=bool)

    @property
    def Pi_e(self):
        return self.Pi[self.even]

    @property
    def Pi_o(self):
        return self.Pi[~self.even]


@dataclass(frozen=True)
class SeparationResult:
    delta: float
    separated: int
    total: int

    @property
    def fraction(self):
        return self.separated / self.total if self.total else 1.0


@dataclass(frozen=True)
class GrowthRow:
    x: float
    count: int
    reference: float

    @property
    def ratio(self):
        return self.count / self.reference


@dataclass(frozen=True)
class ParityRow:
    x: float
    separated_even: int
    reference: float
    even: int
    odd: int
    parity_reference: float
    clustered_in_even_or_double: int

    @property
    def ratio(self):
        return self.separated_even / self.reference

    @property
    def parity_ratio(self):
        return self.even / self.odd if self.odd else math.nan


@dataclass(frozen=True)
class Contributor:
    word: Word
    k: int
    period: float
    term: float


@dataclass
class MlpcResult:
    word: Word
    length: float
    value: float
    contributors: List[Contributor]

    @property
    def lone(self):
        return len(self.contributors) == 1


@dataclass(frozen=True)
class NearRational:
    first: Word
    second: Word
    ratio: float
    p: int
    q: int

    @property
    def error(self):
        return abs(self.ratio - self.p / self.q)


@dataclass(frozen=True)
class ClusterRow:
    word: Word
    length: float
    periods_in_window: int

    @property
    def per_length(self):
        return self.periods_in_window / self.length


def build_sets(db: SpectrumDB, cutoff: Optional[float] = None) -> SpectrumSets:
    """
    Pi and Xi from a spectrum.

    Args:
        db: spectrum
        cutoff (float): largest period kept in Xi; defaults to max(Pi) + 2

    Returns:
        SpectrumSets, closed under iteration up to the cutoff
    """
    primitive = sorted(db.rows, key=lambda row: (row.length, row.m, row.word))
    if not primitive:
        raise SpectrumError("Empty spectrum")
    if cutoff is None:
        cutoff = primitive[-1].length + 2.0
    # the shortest primitive length d0 bounds the iterate count of every orbit
    d0 = primitive[0].length
    max_iterates = int(math.floor((cutoff + 1.0) / d0))
    rays = []
    for row in primitive:
        for k in range(1, max_iterates + 1):
            if k * row.length > cutoff:
                break
            rays.append(PeriodicRay(primitive=row, k=k))
    rays.sort(key=lambda ray: (ray.period, ray.k, ray.primitive.word))
    return SpectrumSets(primitive=primitive, rays=rays, cutoff=cutoff)


def interval_J(T: float, delta: float) -> Tuple[float, float]:
    """J(gamma, delta) = [T - e^{-delta T}, T + e^{-delta T}]."""
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    half = math.exp(-delta * T)
    return T - half, T + half


def _in_window(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    start = np.searchsorted(values, lo - TIE_TOL, side='left')
    stop = np.searchsorted(values, hi + TIE_TOL, side='right')
    return values[start:stop]


def _separated(values: np.ndarray, T: float, delta: float) -> bool:
    lo, hi = interval_J(T, delta)
    window = _in_window(values, lo, hi)
    return bool(np.all(np.abs(window - T) <= TIE_TOL))


def default_delta(h: float) -> float:
    return DEFAULT_DELTA_FACTOR * h


def check_S(sets: SpectrumSets, delta: float) -> SeparationResult:
    """Fraction of primitive orbits whose J(gamma, delta) meets Pi only in T_gamma."""
    separated = sum(_separated(sets.Pi, row.length, delta) for row in sets.primitive)
    return SeparationResult(delta=delta, separated=separated, total=len(sets.primitive))


def check_S2(sets: SpectrumSets, delta: float, x_grid: Sequence[float], h: float) -> List[GrowthRow]:
    """#{gamma: T_gamma <= x, J(gamma, delta) cap Pi = {T_gamma}} against e^{(h/2) x}."""
    flags = np.array([_separated(sets.Pi, T, delta) for T in sets.Pi], dtype=bool)
    rows = []
    for x in x_grid:
        upto = int(np.searchsorted(sets.Pi, x, side='right'))
        rows.append(GrowthRow(x=float(x), count=int(flags[:upto].sum()), reference=math.exp(h * x / 2.0)))
    return rows


def check_S3(sets: SpectrumSets, delta: float, x_grid: Sequence[float], h: float) -> List[ParityRow]:
    """
    Even-reflection orbits whose J(gamma, delta) avoids Pi_o, against e^{(h/3) x}.

    Each row also carries the parity census against e^{hx}/(2hx) and the
    number of even orbits whose window meets Xi only in Pi_e or 2 Pi.
    """
    odd = sets.Pi_o
    allowed = np.sort(np.concatenate([sets.Pi_e, 2.0 * sets.Pi]))
    separated, clustered = [], []
    for row, is_even in zip(sets.primitive, sets.even):
        if not is_even:
            separated.append(False)
            clustered.append(False)
            continue
        lo, hi = interval_J(row.length, delta)
        separated.append(len(_in_window(odd, lo, hi)) == 0)
        periods = _in_window(sets.Xi, lo, hi)
        clustered.append(all(len(_in_window(allowed, d, d)) > 0 for d in periods))
    separated = np.array(separated, dtype=bool)
    clustered = np.array(clustered, dtype=bool)

    rows = []
    for x in x_grid:
        upto = int(np.searchsorted(sets.Pi, x, side='right'))
        even = int(sets.even[:upto].sum())
        rows.append(ParityRow(
            x=float(x),
            separated_even=int(separated[:upto].sum()),
            reference=math.exp(h * x / 3.0),
            even=even,
            odd=upto - even,
            parity_reference=math.exp(h * x) / (2.0 * h * x),
            clustered_in_even_or_double=int(clustered[:upto].sum()),
        ))
    return rows


def _find_primitive(sets: SpectrumSets, target) -> SpectrumRow:
    if isinstance(target, SpectrumRow):
        return target
    word = tuple(target)
    for row in sets.primitive:
        if row.word == word:
            return row
    raise SpectrumError(f"Orbit {format_word(word)} is not in the spectrum")


def mlpc_sum(sets: SpectrumSets, target, delta: float, chi: BumpFunction) -> MlpcResult:
    """
    sum over periodic rays of (-1)^{|gamma|} T_gamma |det(I - P_gamma)|^{-1/2} phi_j(d_gamma)
    with phi_j(t) = chi(e^{delta T_j} (t - T_j)).

    T_gamma is the primitive length and |gamma| the number of reflections
    of the ray; iterates use the k-th power of the primitive monodromy.

    Args:
        sets: spectrum sets with iterates
        target: SpectrumRow or word of gamma_j
        delta (float): window exponent
        chi: non-negative test function

    Raises:
        SpectrumError: the cutoff of Xi is below T_j + 1
    """
    row = _find_primitive(sets, target)
    required = row.length + 1.0
    if sets.cutoff < required:
        raise SpectrumError(f"Xi cutoff {sets.cutoff:.6g} too small; mlpc_sum at "
                            f"{format_word(row.word)} needs cutoff >= {required:.6g}")
    scale = math.exp(delta * row.length)
    reach = chi.support / scale
    start = np.searchsorted(sets.Xi, row.length - reach - TIE_TOL, side='left')
    stop = np.searchsorted(sets.Xi, row.length + reach + TIE_TOL, side='right')
    contributors = []
    for ray in sets.rays[start:stop]:
        weight = float(chi(scale * (ray.period - row.length)))
        if weight == 0.0:
            continue
        sign = -1.0 if ray.reflections % 2 else 1.0
        term = sign * ray.primitive.length / math.sqrt(ray.det_factor) * weight
        contributors.append(Contributor(word=ray.primitive.word, k=ray.k, period=ray.period, term=term))
    return MlpcResult(word=row.word, length=row.length,
                      value=math.fsum(c.term for c in contributors), contributors=contributors)


def mlpc_scan(sets: SpectrumSets, delta: float, chi: BumpFunction) -> List[MlpcResult]:
    """mlpc_sum for every primitive orbit the cutoff allows, in length order."""
    return [mlpc_sum(sets, row, delta, chi) for row in sets.primitive if row.length + 1.0 <= sets.cutoff]


def lone_in_window(sets: SpectrumSets, row: SpectrumRow, delta: float) -> bool:
    """J(gamma, delta) cap Xi = {T_gamma}."""
    lo, hi = interval_J(row.length, delta)
    return len(_in_window(sets.Xi, lo, hi)) == 1


def rational_independence_scan(sets: SpectrumSets, q_max: int = 50, tol: float = 1e-9) -> List[NearRational]:
    """
    Pairs of primitive orbits with T_gamma / T_gamma' within tol of p/q, q <= q_max.

    The ratio is taken as shorter over longer; the smallest such q is reported.
    An orbit and its time reversal trace the same path and enter once; other
    orbits of equal length are flagged with p/q = 1/1.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if q_max < 1:
        raise ValueError(f"q_max must be >= 1, got {q_max}")
    seen, keep = set(), []
    for i, row in enumerate(sets.primitive):
        if reversed_necklace(row.word) not in seen:
            keep.append(i)
        seen.add(row.word)
    lengths = sets.Pi[keep]
    words = [sets.primitive[i].word for i in keep]
    q = np.arange(1, q_max + 1, dtype=float)
    flags = []
    for i in range(len(lengths)):
        ratios = lengths[i] / lengths[i + 1:]
        # columns: candidate denominators
        p = np.rint(ratios[:, None] * q[None, :])
        hits = np.abs(ratios[:, None] - p / q[None, :]) < tol
        for offset in np.nonzero(hits.any(axis=1))[0]:
            column = int(np.argmax(hits[offset]))
            num, den = int(p[offset, column]), column + 1
            g = math.gcd(num, den)
            j = i + 1 + int(offset)
            flags.append(NearRational(first=words[i], second=words[j],
                                      ratio=float(ratios[offset]), p=num // g, q=den // g))
    logger.info("rational independence scan: %d flagged pairs (q <= %d, tol %.1e)", len(flags), q_max, tol)
    return flags


def xi_clustering(sets: SpectrumSets, delta: float) -> Tuple[List[ClusterRow], float]:
    """
    #{d in Xi cap J(gamma, delta)} per primitive orbit, and A0 = max count / T_gamma.
    """
    rows = []
    for row in sets.primitive:
        lo, hi = interval_J(row.length, delta)
        rows.append(ClusterRow(word=row.word, length=row.length, periods_in_window=len(_in_window(sets.Xi, lo, hi))))
    a0 = max((r.per_length for r in rows), default=0.0)
    return rows, a0
