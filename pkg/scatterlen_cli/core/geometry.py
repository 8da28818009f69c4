"""Obstacle geometry: disks in the plane and the no-eclipse condition"""

import hashlib
import itertools
import json
import math
import os
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from scatterlen_cli.utils.errors import ConfigurationError
from scatterlen_cli.utils.logger import get_logger

logger = get_logger(__name__)

HULL_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Disk:
    center: Tuple[float, float]
    radius: float

    def __post_init__(self):
        if len(self.center) != 2:
            raise ConfigurationError(f"Disk center must have two coordinates, got {self.center!r}")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ConfigurationError(f"Disk radius must be positive, got {self.radius!r}")
        object.__setattr__(self, 'center', (float(self.center[0]), float(self.center[1])))
        object.__setattr__(self, 'radius', float(self.radius))

    @property
    def curvature(self):
        return 1.0 / self.radius


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    point: np.ndarray
    normal: np.ndarray
    curvature: float


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the no-eclipse check.

    ``violations`` holds 1-based triples (i, j, l) with i < j: disk l meets
    the convex hull of disks i and j.
    """
    passed: bool
    violations: List[Tuple[int, int, int]] = field(default_factory=list)
    worst_margin: float = math.inf

    def summary(self):
        if self.passed:
            return "(H): pass"
        triples = ", ".join(f"({i},{j},{l})" for i, j, l in self.violations)
        return f"(H): fail {triples}"


def _pair_distance(a: Disk, b: Disk) -> float:
    return math.hypot(a.center[0] - b.center[0], a.center[1] - b.center[1]) - a.radius - b.radius


class ObstacleSystem:
    """
    Ordered collection of pairwise disjoint disks K_1..K_kappa.

    Construction checks the disk count and disjointness. The no-eclipse
    condition is checked by validate_no_eclipse(); load_geometry() refuses
    configurations that fail it.
    """

    def __init__(self, disks: Sequence[Disk]):
        disks = tuple(disks)
        if len(disks) < 3:
            raise ConfigurationError(f"At least 3 disks are required, got {len(disks)}")
        for (i, a), (j, b) in itertools.combinations(enumerate(disks, start=1), 2):
            if _pair_distance(a, b) <= 0:
                raise ConfigurationError(f"Disks {i} and {j} overlap or touch")
        self._disks = disks
        self._centers = np.array([d.center for d in disks], dtype=float)
        self._radii = np.array([d.radius for d in disks], dtype=float)
        self._min_gap = min(_pair_distance(a, b) for a, b in itertools.combinations(disks, 2))

    @property
    def disks(self):
        return self._disks

    @property
    def kappa(self):
        return len(self._disks)

    @property
    def centers(self):
        return self._centers.copy()

    @property
    def radii(self):
        return self._radii.copy()

    @property
    def min_gap(self):
        return self._min_gap

    def disk(self, symbol: int) -> Disk:
        """Disk for a 1-based obstacle symbol."""
        if not 1 <= symbol <= self.kappa:
            raise ConfigurationError(f"Obstacle symbol {symbol} outside 1..{self.kappa}")
        return self._disks[symbol - 1]

    def distance(self, i: int, j: int) -> float:
        """dist(K_i, K_j) for 1-based symbols."""
        return _pair_distance(self.disk(i), self.disk(j))

    def to_dict(self):
        return {'disks': [{'center': list(d.center), 'radius': d.radius} for d in self._disks]}

    def geometry_hash(self):
        """SHA-256 of the disk list rendered with 17 significant digits per number."""
        canonical = ";".join(
            f"{d.center[0]:.17g},{d.center[1]:.17g},{d.radius:.17g}" for d in self._disks
        )
        return hashlib.sha256(canonical.encode('ascii')).hexdigest()

    def __eq__(self, other):
        return isinstance(other, ObstacleSystem) and self._disks == other._disks

    def __hash__(self):
        return hash(self._disks)

    def __repr__(self):
        return f"ObstacleSystem({list(self._disks)!r})"


def hull_signed_distance(point, a: Disk, b: Disk) -> float:
    """
    Signed distance from ``point`` to the convex hull of two disjoint disks.

    The hull is the union of the disks interpolating centers and radii
    linearly; the distance along that family is convex in the interpolation
    parameter, so the unconstrained stationary point clipped to the segment
    is the minimizer.

    Args:
        point: 2-vector
        a, b: the two disks spanning the hull

    Returns:
        float: negative inside the hull, positive outside
    """
    ca = np.asarray(a.center)
    axis = np.asarray(b.center) - ca
    length = float(np.hypot(*axis))
    e = axis / length
    u = np.asarray(point, dtype=float) - ca
    along = float(u @ e)
    perp = abs(float(u[0] * e[1] - u[1] * e[0]))
    slope = (b.radius - a.radius) / length
    s = along + slope * perp / math.sqrt(1.0 - slope * slope)
    s = min(max(s, 0.0), length)
    return math.hypot(along - s, perp) - a.radius - s * slope


def validate_no_eclipse(system: ObstacleSystem) -> ValidationReport:
    """
    Check condition (H): no disk meets the convex hull of two others.

    Args:
        system: a constructed ObstacleSystem

    Returns:
        ValidationReport: pass/fail with every violating triple (i, j, l)
    """
    violations = []
    worst = math.inf
    disks = system.disks
    for i, j in itertools.combinations(range(len(disks)), 2):
        for l, other in enumerate(disks):
            if l in (i, j):
                continue
            margin = hull_signed_distance(other.center, disks[i], disks[j]) - other.radius
            worst = min(worst, margin)
            if margin <= HULL_TOLERANCE:
                violations.append((i + 1, j + 1, l + 1))
    report = ValidationReport(passed=not violations, violations=violations, worst_margin=worst)
    logger.info("no-eclipse check: %s (worst margin %.6g)", report.summary(), worst)
    return report


def min_separation(system: ObstacleSystem) -> float:
    """min over pairs of ||c_i - c_j|| - r_i - r_j."""
    return system.min_gap


def boundary_point(disk: Disk, angle: float) -> BoundaryPoint:
    """
    Point, outward unit normal and curvature of a disk boundary.

    Args:
        disk: the obstacle
        angle (float): boundary parameter in radians

    Returns:
        BoundaryPoint
    """
    theta = math.fmod(angle, 2.0 * math.pi)
    normal = np.array([math.cos(theta), math.sin(theta)])
    point = np.asarray(disk.center) + disk.radius * normal
    return BoundaryPoint(point=point, normal=normal, curvature=disk.curvature)


def system_from_dict(data) -> ObstacleSystem:
    """Build a system from the ``{"disks": [{"center": [x, y], "radius": r}, ...]}`` layout."""
    if not isinstance(data, dict) or 'disks' not in data:
        raise ConfigurationError("Geometry config must be an object with a 'disks' list")
    disks = []
    for index, entry in enumerate(data['disks'], start=1):
        try:
            disks.append(Disk(center=tuple(entry['center']), radius=float(entry['radius'])))
        except (KeyError, TypeError) as e:
            raise ConfigurationError(f"Disk {index}: expected 'center' and 'radius' ({e})")
    return ObstacleSystem(disks)


def read_geometry(path) -> ObstacleSystem:
    """Parse a geometry JSON file without enforcing condition (H)."""
    if not os.path.exists(path):
        raise ConfigurationError(f"Geometry file not found: {path}")
    try:
        with open(path) as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Geometry file {path} is not valid JSON: {e}")
    return system_from_dict(data)


def load_geometry(path) -> ObstacleSystem:
    """
    Read a geometry JSON file and enforce condition (H).

    Args:
        path (str): Path to the JSON file

    Returns:
        ObstacleSystem

    Raises:
        ConfigurationError: unreadable file, malformed content, fewer than
            three disks, overlapping disks or a failing (H) check
    """
    system = read_geometry(path)
    report = validate_no_eclipse(system)
    if not report.passed:
        raise ConfigurationError(f"Geometry {path} rejected: {report.summary()}")
    return system


def default_system() -> ObstacleSystem:
    """Asymmetric three-disk system used for experiments (lengths tie only under time reversal)."""
    return ObstacleSystem([
        Disk((0.0, 0.0), 1.0),
        Disk((6.0, 0.0), 0.9),
        Disk((2.6, 5.3), 1.1),
    ])


def symmetric_system(center_distance=6.0, radius=1.0) -> ObstacleSystem:
    """Equal disks on an equilateral triangle; closed-form calibration orbits."""
    height = center_distance * math.sqrt(3.0) / 2.0
    return ObstacleSystem([
        Disk((0.0, 0.0), radius),
        Disk((center_distance, 0.0), radius),
        Disk((center_distance / 2.0, height), radius),
    ])
