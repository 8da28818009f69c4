"""Linear Poincare maps, wavefront curvature and the unstable expansion weight g"""

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from scatterlen_cli.core.orbit_solver import Orbit
from scatterlen_cli.core.symbolic import format_word
from scatterlen_cli.utils.errors import GeometryError

DEFAULT_MEMORY = 40
TANGENCY_COSINE = 1e-6
SYMPLECTIC_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class StabilityData:
    """Monodromy of a periodic ray transverse to the flow.

    ``matrix`` is the product of dispersing reflection and free-flight
    Jacobi matrices over one period; it has determinant 1.
    """
    matrix: np.ndarray
    lambda_u: float
    det_factor: float
    g_sum: float

    @property
    def trace(self):
        return float(self.matrix[0, 0] + self.matrix[1, 1])


@dataclass(frozen=True)
class Bounce:
    """One step of a trajectory window: flight of ``flight`` then reflection."""
    flight: float
    curvature: float
    cosine: float


def flight_matrix(t):
    return np.array([[1.0, t], [0.0, 1.0]])


def reflection_matrix(curvature, cosine):
    if cosine < TANGENCY_COSINE:
        raise GeometryError(f"Near-tangent reflection (cos phi = {cosine:.3e})")
    return np.array([[1.0, 0.0], [2.0 * curvature / cosine, 1.0]])


def propagate_curvature(B, t):
    """Free-flight evolution of a wavefront curvature: B / (1 + t B)."""
    denominator = 1.0 + t * B
    if denominator == 0.0:
        raise GeometryError(f"Focusing singularity: 1 + t B = 0 (B = {B!r}, t = {t!r})")
    return B / denominator


def reflect_curvature(B, curvature, cosine):
    """Curvature jump at a dispersing reflection: B + 2 kappa / cos(phi)."""
    if cosine <= 0.0:
        raise GeometryError(f"Tangential or invalid reflection (cos phi = {cosine!r})")
    return B + 2.0 * curvature / cosine


def _orbit_bounces(orbit: Orbit):
    """Bounce j: flight along the segment arriving at bounce j, then reflection at j."""
    lengths = orbit.segment_lengths
    cosines = orbit.incidence_cosines
    if np.min(cosines) < TANGENCY_COSINE:
        raise GeometryError(f"{format_word(orbit.word)}: near-tangent reflection "
                            f"(cos phi = {np.min(cosines):.3e})")
    arriving = np.roll(lengths, 1)
    return [Bounce(float(arriving[j]), float(orbit.curvatures[j]), float(cosines[j]))
            for j in range(orbit.period)]


def poincare_map(orbit: Orbit, memory: int = DEFAULT_MEMORY) -> StabilityData:
    """
    Linear Poincare map P_gamma of a solved periodic ray.

    Args:
        orbit: solved, admissible orbit
        memory (int): window length for the g-weights summed into ``g_sum``

    Returns:
        StabilityData

    Raises:
        GeometryError: near-tangent reflection or non-hyperbolic product
    """
    bounces = _orbit_bounces(orbit)
    m = orbit.period
    matrix = np.eye(2)
    # start right after bounce 0: fly to bounce 1, reflect, ...
    for step in range(1, m + 1):
        bounce = bounces[step % m]
        matrix = reflection_matrix(bounce.curvature, bounce.cosine) @ flight_matrix(bounce.flight) @ matrix
    det = float(np.linalg.det(matrix))
    # entries grow like lambda_u, so the determinant is only resolved relative to their square
    if abs(det - 1.0) > SYMPLECTIC_TOL * max(1.0, float(np.max(np.abs(matrix)))) ** 2:
        raise GeometryError(f"{format_word(orbit.word)}: monodromy determinant {det!r} is not 1")
    trace = float(matrix[0, 0] + matrix[1, 1])
    if abs(trace) <= 2.0:
        raise GeometryError(f"{format_word(orbit.word)}: monodromy is not hyperbolic (trace {trace!r})")
    lambda_u = (abs(trace) + math.sqrt(trace * trace - 4.0)) / 2.0
    g_sum = math.fsum(g_weight(orbit, j, memory=memory) for j in range(m))
    return StabilityData(matrix=matrix, lambda_u=lambda_u, det_factor=abs(2.0 - trace), g_sum=g_sum)


def unstable_curvature(window: Sequence[Bounce], seed_curvature=0.0):
    """
    Wavefront curvature after running a window of bounces from a seed.

    The curvature map is a contraction for dispersing bounces, so the result
    converges to the unstable-manifold curvature as the window grows.
    """
    B = seed_curvature
    for bounce in window:
        B = reflect_curvature(propagate_curvature(B, bounce.flight), bounce.curvature, bounce.cosine)
    return B


def g_weight(orbit: Orbit, index: int, memory: int = DEFAULT_MEMORY,
             seed_curvature=0.0, window: Optional[Sequence[Bounce]] = None):
    """
    Per-bounce logarithmic expansion g = ln(1 + t B_post) at a bounce.

    B_post is the unstable wavefront curvature just after the reflection at
    ``index``, obtained by iterating the curvature maps over the ``memory``
    preceding bounces from ``seed_curvature``; t is the next flight length.

    Args:
        orbit: solved periodic orbit
        index (int): bounce index 0..m-1
        memory (int): number of past bounces used
        seed_curvature (float): curvature the window starts from
        window: explicit past window (oldest first, ending with the bounce at
            ``index``); defaults to the periodic continuation of the orbit

    Returns:
        float

    Raises:
        ValueError: window shorter than ``memory``
    """
    m = orbit.period
    if window is None:
        bounces = _orbit_bounces(orbit)
        window = [bounces[(index - memory + 1 + step) % m] for step in range(memory)]
    elif len(window) < memory:
        raise ValueError(f"Past window has {len(window)} bounces, memory {memory} requires at least {memory}")
    else:
        window = list(window)[-memory:]
    B = unstable_curvature(window, seed_curvature)
    outgoing = float(orbit.segment_lengths[index % m])
    return math.log1p(outgoing * B)


def iterate_stability(stability: StabilityData, k: int) -> Tuple[float, float]:
    """
    |det(I - P^k)| for the k-th iterate, from the matrix power and from lambda_u^k.

    Returns:
        tuple: (from_matrix_power, from_eigenvalue)
    """
    if int(k) != k or k < 1:
        raise ValueError(f"Iterate count must be an integer >= 1, got {k!r}")
    power = np.linalg.matrix_power(stability.matrix, k)
    direct = abs(2.0 - float(power[0, 0] + power[1, 1]))
    lam = stability.lambda_u
    sign = 1.0 if stability.trace > 0 else (-1.0) ** k
    from_eigen = abs(2.0 - sign * (lam ** k + lam ** (-k)))
    return direct, from_eigen


def det_factor_from_lambda(lambda_u: float, k: int = 1) -> float:
    """|det(I - P^k)| = lambda^k + lambda^-k - 2 for positive-trace hyperbolic P."""
    return lambda_u ** k + lambda_u ** (-k) - 2.0


def det_growth_constant(rows: Iterable) -> float:
    """
    Smallest c with |det(I - P_gamma)| <= e^{c T_gamma} over a spectrum.

    Args:
        rows: objects with ``length`` and ``det_factor`` attributes

    Returns:
        float
    """
    return max(math.log(row.det_factor) / row.length for row in rows)
