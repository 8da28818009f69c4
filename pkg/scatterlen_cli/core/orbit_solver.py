"""Periodic reflecting rays: Newton solver on the cyclic length functional"""

import math
from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from scatterlen_cli.core.geometry import ObstacleSystem
from scatterlen_cli.core.symbolic import (
    Necklace, Word, format_word, is_admissible, primitive_root,
)
from scatterlen_cli.utils.errors import GeometryError, SolverError
from scatterlen_cli.utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 200
DEFAULT_STARTS = 5
DEFAULT_JITTER = 0.3
AGREEMENT_TOL = 1e-9
REFLECTION_TOL = 1e-10
LINE_SEARCH_THRESHOLD = 1e-6
DESCENT_STEPS = 3


@dataclass(frozen=True, eq=False)
class Orbit:
    """A periodic reflecting ray following ``word`` (one bounce per symbol)."""
    word: Word
    necklace: Necklace
    angles: np.ndarray
    points: np.ndarray
    centers: np.ndarray
    radii: np.ndarray
    length: float
    gradient_residual: float
    solver_iterations: int
    min_hessian_eigenvalue: float = math.nan

    @property
    def period(self):
        """Number of reflections m_gamma."""
        return len(self.word)

    @property
    def normals(self):
        return (self.points - self.centers) / self.radii[:, None]

    @property
    def curvatures(self):
        return 1.0 / self.radii

    @property
    def segment_lengths(self):
        """Length of the flight leaving bounce j (towards bounce j + 1)."""
        d = np.roll(self.points, -1, axis=0) - self.points
        return np.hypot(d[:, 0], d[:, 1])

    @property
    def directions(self):
        """Unit direction of the flight leaving bounce j."""
        d = np.roll(self.points, -1, axis=0) - self.points
        return d / np.hypot(d[:, 0], d[:, 1])[:, None]

    @property
    def incidence_cosines(self):
        """cos(phi_j) between the outgoing flight and the outward normal at bounce j."""
        return np.einsum('ij,ij->i', self.directions, self.normals)


@dataclass(frozen=True)
class IteratedOrbit:
    word: Word
    primitive: Orbit
    repetitions: int
    period: float


@dataclass(frozen=True, eq=False)
class OpenPath:
    """Stationary open trajectory through the obstacles of ``word``."""
    word: Word
    angles: np.ndarray
    points: np.ndarray
    segment_lengths: np.ndarray
    gradient_residual: float


@dataclass(frozen=True)
class AdmissibilityReport:
    ok: bool
    worst_clearance: float
    max_reflection_residual: float
    min_cosine: float


@dataclass(frozen=True)
class RefinedOrbit:
    """High-precision version of an orbit (mpmath numbers)."""
    word: Word
    angles: list
    length: mpmath.mpf
    gradient_residual: mpmath.mpf
    dps: int


def _bounce_geometry(system: ObstacleSystem, word: Sequence[int]):
    index = np.asarray(word, dtype=int) - 1
    if index.min() < 0 or index.max() >= system.kappa:
        raise GeometryError(f"Word {format_word(word)} uses symbols outside 1..{system.kappa}")
    return system.centers[index], system.radii[index]


def _segments(m, cyclic):
    start = np.arange(m if cyclic else m - 1)
    return start, (start + 1) % m


def length_terms(centers, radii, theta, cyclic=True):
    """
    Length functional L(theta) = sum ||x_{j+1} - x_j|| with analytic gradient and Hessian.

    Args:
        centers: (m, 2) disk centers along the itinerary
        radii: (m,) disk radii
        theta: (m,) boundary angles
        cyclic (bool): close the polygon (periodic ray) or leave it open

    Returns:
        tuple: (L, gradient, Hessian)
    """
    m = len(theta)
    normal = np.column_stack([np.cos(theta), np.sin(theta)])
    tangent = np.column_stack([-normal[:, 1], normal[:, 0]])
    x = centers + radii[:, None] * normal
    dx = radii[:, None] * tangent
    ddx = -radii[:, None] * normal

    a, b = _segments(m, cyclic)
    d = x[b] - x[a]
    ell = np.hypot(d[:, 0], d[:, 1])
    u = d / ell[:, None]

    grad = np.zeros(m)
    np.add.at(grad, a, -np.einsum('ij,ij->i', dx[a], u))
    np.add.at(grad, b, np.einsum('ij,ij->i', dx[b], u))

    # Q = (I - u u^T) / ell applied to the tangent vectors
    def q_form(v, w):
        return (np.einsum('ij,ij->i', v, w) - np.einsum('ij,ij->i', v, u) * np.einsum('ij,ij->i', w, u)) / ell

    hess = np.zeros((m, m))
    np.add.at(hess, (a, a), q_form(dx[a], dx[a]) - np.einsum('ij,ij->i', ddx[a], u))
    np.add.at(hess, (b, b), q_form(dx[b], dx[b]) + np.einsum('ij,ij->i', ddx[b], u))
    cross = -q_form(dx[a], dx[b])
    np.add.at(hess, (a, b), cross)
    np.add.at(hess, (b, a), cross)
    return math.fsum(ell), grad, hess


def initial_angles(centers, cyclic=True):
    """Each reflection point faces the segment between its neighbours' centers."""
    m = len(centers)
    angles = np.empty(m)
    for j in range(m):
        neighbours = []
        if cyclic or j > 0:
            neighbours.append(centers[(j - 1) % m])
        if cyclic or j < m - 1:
            neighbours.append(centers[(j + 1) % m])
        e = sum((c - centers[j]) / np.hypot(*(c - centers[j])) for c in neighbours)
        angles[j] = math.atan2(e[1], e[0])
    return angles


def _backtrack(centers, radii, theta, step, value, slope, cyclic):
    alpha = 1.0
    while alpha > 1e-12:
        trial = length_terms(centers, radii, theta + alpha * step, cyclic)[0]
        if trial <= value + 1e-4 * alpha * slope:
            break
        alpha *= 0.5
    return theta + alpha * step


def descent_step(centers, radii, theta, cyclic=True):
    """One steepest-descent step on L with backtracking, scaled by the Hessian diagonal."""
    theta = np.array(theta, dtype=float)
    value, grad, hess = length_terms(centers, radii, theta, cyclic)
    step = -grad / max(float(np.max(np.abs(np.diag(hess)))), 1.0)
    return _backtrack(centers, radii, theta, step, value, float(grad @ step), cyclic)


def _newton(centers, radii, theta, cyclic, tol, max_iter):
    """
    Damped Newton iteration on grad L = 0.

    The first DESCENT_STEPS iterations are gradient steps; later ones fall back
    to gradient steps where the Hessian is not positive definite.
    """
    theta = np.array(theta, dtype=float)
    for iteration in range(max_iter + 1):
        value, grad, hess = length_terms(centers, radii, theta, cyclic)
        gnorm = float(np.max(np.abs(grad)))
        if gnorm < tol:
            return theta, value, gnorm, hess, iteration
        if iteration == max_iter:
            break
        if iteration < DESCENT_STEPS and gnorm > LINE_SEARCH_THRESHOLD:
            theta = descent_step(centers, radii, theta, cyclic)
            continue
        try:
            step = -cho_solve(cho_factor(hess), grad)
        except LinAlgError:
            step = -grad / max(float(np.max(np.abs(np.diag(hess)))), 1.0)

        if gnorm > LINE_SEARCH_THRESHOLD:
            theta = _backtrack(centers, radii, theta, step, value, float(grad @ step), cyclic)
        else:
            theta = theta + step
    raise SolverError(
        f"Newton iteration did not converge (|grad L| = {gnorm:.3e})",
        iterations=max_iter, gradient_norm=gnorm,
    )


def orbit_from_angles(system: ObstacleSystem, word: Sequence[int], angles,
                      gradient_residual=math.nan, iterations=0, min_eigenvalue=math.nan) -> Orbit:
    """Assemble an Orbit from boundary angles (no solving)."""
    word = tuple(word)
    centers, radii = _bounce_geometry(system, word)
    angles = np.asarray(angles, dtype=float)
    points = centers + radii[:, None] * np.column_stack([np.cos(angles), np.sin(angles)])
    d = np.roll(points, -1, axis=0) - points
    root, _ = primitive_root(word)
    return Orbit(
        word=word,
        necklace=Necklace.from_word(root),
        angles=angles,
        points=points,
        centers=centers,
        radii=radii,
        length=math.fsum(np.hypot(d[:, 0], d[:, 1])),
        gradient_residual=gradient_residual,
        solver_iterations=iterations,
        min_hessian_eigenvalue=min_eigenvalue,
    )


def solve_cycle(system: ObstacleSystem, word, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                starts=DEFAULT_STARTS, jitter=DEFAULT_JITTER, seed=0) -> Orbit:
    """
    Compute the periodic reflecting ray following a cyclic itinerary.

    The ray is the critical point of the cyclic length functional in the
    boundary angles. Besides the facing-neighbours start, ``starts`` jittered
    initializations are solved and must land on the same points.

    Args:
        system: validated obstacle system
        word: Necklace or any rotation of a primitive admissible cyclic word
        tol (float): sup-norm tolerance on grad L
        max_iter (int): Newton iteration cap per start
        starts (int): number of extra jittered starts
        jitter (float): jitter amplitude in radians
        seed (int): base seed; the generator is seeded with (seed, *word)

    Returns:
        Orbit

    Raises:
        SolverError: non-convergence or multi-start disagreement
        GeometryError: the converged ray fails verify_admissibility
    """
    word = tuple(word.representative if isinstance(word, Necklace) else word)
    if len(word) < 2 or not is_admissible(word, cyclic=True):
        raise ValueError(f"Word {format_word(word)} is not cyclically admissible")
    if primitive_root(word)[1] != 1:
        raise ValueError(f"Word {format_word(word)} is not primitive")

    centers, radii = _bounce_geometry(system, word)
    base = initial_angles(centers)
    try:
        theta, _, gnorm, hess, iterations = _newton(centers, radii, base, True, tol, max_iter)
    except SolverError as e:
        raise SolverError(f"{format_word(word)}: {e}", word=word,
                          iterations=e.iterations, gradient_norm=e.gradient_norm)

    min_eig = float(np.linalg.eigvalsh(hess)[0])
    if min_eig <= 0:
        logger.warning("%s: Hessian of the length functional not positive definite (min eigenvalue %.3e)",
                       format_word(word), min_eig)
    orbit = orbit_from_angles(system, word, theta, gnorm, iterations, min_eig)

    rng = np.random.default_rng([int(seed), *word])
    for attempt in range(starts):
        start = base + rng.uniform(-jitter, jitter, size=len(word))
        try:
            other = _newton(centers, radii, start, True, tol, max_iter)[0]
        except SolverError as e:
            raise SolverError(f"{format_word(word)}: jittered start {attempt + 1}: {e}", word=word,
                              iterations=e.iterations, gradient_norm=e.gradient_norm)
        other_points = centers + radii[:, None] * np.column_stack([np.cos(other), np.sin(other)])
        spread = float(np.max(np.abs(other_points - orbit.points)))
        if spread > AGREEMENT_TOL:
            raise SolverError(
                f"{format_word(word)}: jittered start {attempt + 1} converged to a different ray "
                f"(max point difference {spread:.3e})", word=word,
            )

    report = verify_admissibility(system, orbit)
    if not report.ok:
        raise GeometryError(
            f"{format_word(word)}: solved ray is not admissible (clearance {report.worst_clearance:.3e}, "
            f"reflection residual {report.max_reflection_residual:.3e})"
        )
    logger.debug("%s: T = %.15g after %d iterations, |grad L| = %.2e",
                 format_word(word), orbit.length, iterations, gnorm)
    return orbit


def _segment_clearance(p, q, center, radius):
    d = q - p
    t = min(max(float((center - p) @ d) / float(d @ d), 0.0), 1.0)
    closest = p + t * d
    return math.hypot(*(center - closest)) - radius


def verify_admissibility(system: ObstacleSystem, orbit: Orbit) -> AdmissibilityReport:
    """
    Check that every flight avoids the other disks and the reflection law holds.

    Args:
        system: obstacle system the orbit was solved in
        orbit: orbit to check

    Returns:
        AdmissibilityReport: ``ok`` plus worst clearance, largest reflection
            residual and smallest incidence cosine
    """
    m = orbit.period
    points = orbit.points
    normals = (points - orbit.centers) / orbit.radii[:, None]
    out_dir = orbit.directions
    in_dir = np.roll(out_dir, 1, axis=0)

    worst = math.inf
    for j in range(m):
        nxt = (j + 1) % m
        for symbol, disk in enumerate(system.disks, start=1):
            if symbol in (orbit.word[j], orbit.word[nxt]):
                continue
            worst = min(worst, _segment_clearance(points[j], points[nxt], np.asarray(disk.center), disk.radius))

    reflected = in_dir - 2.0 * np.einsum('ij,ij->i', in_dir, normals)[:, None] * normals
    residual = float(np.max(np.abs(out_dir - reflected)))
    min_cos = float(min(np.min(np.einsum('ij,ij->i', out_dir, normals)),
                        np.min(-np.einsum('ij,ij->i', in_dir, normals))))
    ok = worst > 0 and residual < REFLECTION_TOL and min_cos > 0
    return AdmissibilityReport(ok=ok, worst_clearance=worst, max_reflection_residual=residual, min_cosine=min_cos)


def iterate_orbit(orbit: Orbit, k: int) -> IteratedOrbit:
    """k-fold iterate: word repeated k times, period d = k T."""
    if int(k) != k or k < 1:
        raise ValueError(f"Iterate count must be an integer >= 1, got {k!r}")
    return IteratedOrbit(word=orbit.word * k, primitive=orbit, repetitions=k, period=k * orbit.length)


def solve_open_path(system: ObstacleSystem, word: Sequence[int], tol=DEFAULT_TOL,
                    max_iter=DEFAULT_MAX_ITER) -> OpenPath:
    """
    Stationary open trajectory through the obstacles of ``word``.

    End points are free on their disks, so the first and last flights leave
    along the boundary normals.

    Args:
        system: obstacle system
        word: linearly admissible itinerary of length >= 2

    Returns:
        OpenPath
    """
    word = tuple(word)
    if len(word) < 2 or not is_admissible(word):
        raise ValueError(f"Word {format_word(word)} is not admissible")
    centers, radii = _bounce_geometry(system, word)
    try:
        theta, _, gnorm, _, _ = _newton(centers, radii, initial_angles(centers, cyclic=False),
                                        False, tol, max_iter)
    except SolverError as e:
        raise SolverError(f"open path {format_word(word)}: {e}", word=word,
                          iterations=e.iterations, gradient_norm=e.gradient_norm)
    points = centers + radii[:, None] * np.column_stack([np.cos(theta), np.sin(theta)])
    d = np.diff(points, axis=0)
    return OpenPath(word=word, angles=theta, points=points,
                    segment_lengths=np.hypot(d[:, 0], d[:, 1]), gradient_residual=gnorm)


def _length_terms_mp(centers, radii, theta):
    m = len(theta)
    xs = [(centers[j][0] + radii[j] * mpmath.cos(theta[j]), centers[j][1] + radii[j] * mpmath.sin(theta[j]))
          for j in range(m)]
    dxs = [(-radii[j] * mpmath.sin(theta[j]), radii[j] * mpmath.cos(theta[j])) for j in range(m)]
    ddxs = [(-radii[j] * mpmath.cos(theta[j]), -radii[j] * mpmath.sin(theta[j])) for j in range(m)]

    def dot(v, w):
        return v[0] * w[0] + v[1] * w[1]

    total = mpmath.mpf(0)
    grad = mpmath.matrix(m, 1)
    hess = mpmath.matrix(m, m)
    for a in range(m):
        b = (a + 1) % m
        d = (xs[b][0] - xs[a][0], xs[b][1] - xs[a][1])
        ell = mpmath.sqrt(dot(d, d))
        u = (d[0] / ell, d[1] / ell)
        total += ell
        grad[a] -= dot(dxs[a], u)
        grad[b] += dot(dxs[b], u)

        def q_form(v, w):
            return (dot(v, w) - dot(v, u) * dot(w, u)) / ell

        hess[a, a] += q_form(dxs[a], dxs[a]) - dot(ddxs[a], u)
        hess[b, b] += q_form(dxs[b], dxs[b]) + dot(ddxs[b], u)
        cross = -q_form(dxs[a], dxs[b])
        hess[a, b] += cross
        hess[b, a] += cross
    return total, grad, hess


def refine_cycle_mp(system: ObstacleSystem, orbit: Orbit, dps=60, max_iter=20) -> RefinedOrbit:
    """
    Polish a solved orbit with Newton steps in ``dps``-digit arithmetic.

    Needed when length differences far below double precision matter.

    Args:
        system: obstacle system
        orbit: double-precision solution used as the starting point
        dps (int): decimal digits of working precision

    Returns:
        RefinedOrbit
    """
    with mpmath.workdps(dps):
        centers = [(mpmath.mpf(d.center[0]), mpmath.mpf(d.center[1]))
                   for d in (system.disk(s) for s in orbit.word)]
        radii = [mpmath.mpf(system.disk(s).radius) for s in orbit.word]
        theta = [mpmath.mpf(float(t)) for t in orbit.angles]
        target = mpmath.mpf(10) ** (-(dps - 10))
        for _ in range(max_iter):
            total, grad, hess = _length_terms_mp(centers, radii, theta)
            gnorm = max(abs(g) for g in grad)
            if gnorm < target:
                break
            step = mpmath.lu_solve(hess, -grad)
            theta = [t + s for t, s in zip(theta, step)]
        else:
            raise SolverError(f"{format_word(orbit.word)}: high-precision refinement stalled at "
                              f"|grad L| = {mpmath.nstr(gnorm, 5)}", word=orbit.word)
        return RefinedOrbit(word=orbit.word, angles=theta, length=+total, gradient_residual=+gnorm, dps=dps)
