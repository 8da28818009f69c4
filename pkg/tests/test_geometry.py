import json
import math

import numpy as np
import pytest

from scatterlen_cli.core.geometry import (
    Disk, ObstacleSystem, boundary_point, default_system, hull_signed_distance, load_geometry,
    min_separation, read_geometry, symmetric_system, validate_no_eclipse,
)
from scatterlen_cli.utils.errors import ConfigurationError


def collinear():
    return ObstacleSystem([Disk((0, 0), 1), Disk((5, 0), 1), Disk((10, 0), 1)])


def test_default_system_passes_no_eclipse():
    report = validate_no_eclipse(default_system())
    assert report.passed
    assert report.summary() == "(H): pass"


def test_collinear_system_names_violating_triple():
    report = validate_no_eclipse(collinear())
    assert not report.passed
    assert report.violations == [(1, 3, 2)]
    assert report.summary() == "(H): fail (1,3,2)"


def test_equilateral_margin(symmetric):
    report = validate_no_eclipse(symmetric)
    assert report.worst_margin == pytest.approx(3.0 * math.sqrt(3.0) - 2.0, abs=1e-12)


def test_hull_distance_of_equal_disks():
    a, b = Disk((0, 0), 1), Disk((6, 0), 1)
    assert hull_signed_distance((3, 5), a, b) == pytest.approx(4.0)
    assert hull_signed_distance((0, 0), a, b) == pytest.approx(-1.0)
    assert hull_signed_distance((-3, 0), a, b) == pytest.approx(2.0)


def test_hull_distance_of_unequal_disks_matches_sampling():
    a, b = Disk((0, 0), 1.0), Disk((6, 0), 2.0)
    point = np.array([2.0, 4.0])
    s = np.linspace(0.0, 6.0, 600001)
    sampled = np.min(np.hypot(point[0] - s, point[1]) - (1.0 + s / 6.0))
    assert hull_signed_distance(point, a, b) == pytest.approx(sampled, abs=1e-8)


def test_too_few_disks():
    with pytest.raises(ConfigurationError, match="At least 3"):
        ObstacleSystem([Disk((0, 0), 1), Disk((5, 0), 1)])


def test_overlapping_disks():
    with pytest.raises(ConfigurationError, match="overlap"):
        ObstacleSystem([Disk((0, 0), 1), Disk((1.5, 0), 1), Disk((0, 8), 1)])


def test_invalid_radius():
    with pytest.raises(ConfigurationError):
        Disk((0, 0), -1.0)


def test_min_separation():
    system = ObstacleSystem([Disk((0, 0), 1), Disk((5, 0), 1), Disk((0, 7), 1)])
    assert min_separation(system) == pytest.approx(3.0)
    assert system.distance(1, 3) == pytest.approx(5.0)


def test_geometry_hash_tracks_every_digit():
    base = default_system()
    assert base.geometry_hash() == default_system().geometry_hash()
    moved = ObstacleSystem([Disk((0.0, 0.0), 1.0), Disk((6.0, 0.0), 0.9), Disk((2.6, 5.3 + 1e-15), 1.1)])
    assert moved.geometry_hash() != base.geometry_hash()


def test_boundary_point():
    bp = boundary_point(Disk((2, 3), 0.5), math.pi / 2)
    np.testing.assert_allclose(bp.point, [2.0, 3.5], atol=1e-15)
    np.testing.assert_allclose(bp.normal, [0.0, 1.0], atol=1e-15)
    assert bp.curvature == 2.0


def test_load_geometry_round_trip(tmp_path):
    path = tmp_path / "geom.json"
    path.write_text(json.dumps(default_system().to_dict()))
    assert load_geometry(str(path)) == default_system()


def test_load_geometry_rejects_failing_configuration(tmp_path):
    path = tmp_path / "geom.json"
    path.write_text(json.dumps(collinear().to_dict()))
    with pytest.raises(ConfigurationError, match=r"\(1,3,2\)"):
        load_geometry(str(path))
    assert read_geometry(str(path)) == collinear()


def test_load_geometry_errors(tmp_path):
    with pytest.raises(ConfigurationError, match="not found"):
        load_geometry(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigurationError, match="not valid JSON"):
        load_geometry(str(bad))
    incomplete = tmp_path / "incomplete.json"
    incomplete.write_text(json.dumps({"disks": [{"center": [0, 0]}]}))
    with pytest.raises(ConfigurationError, match="Disk 1"):
        load_geometry(str(incomplete))


def test_symmetric_system_layout():
    system = symmetric_system(6.0, 1.0)
    assert system.kappa == 3
    assert system.distance(1, 2) == pytest.approx(4.0)
    assert system.distance(2, 3) == pytest.approx(4.0)
