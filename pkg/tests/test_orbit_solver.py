import math

import mpmath
import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from scatterlen_cli.core.orbit_solver import (
    descent_step, initial_angles, iterate_orbit, length_terms, orbit_from_angles, refine_cycle_mp, solve_cycle,
    solve_open_path, verify_admissibility,
)
from scatterlen_cli.core.symbolic import enumerate_necklaces


def rotate(point, centre, angle):
    c, s = math.cos(angle), math.sin(angle)
    d = point - centre
    return centre + np.array([c * d[0] - s * d[1], s * d[0] + c * d[1]])


def symmetric_three_cycle_oracle(system):
    """Minimize over rotation-symmetric triangles: one free angle on disk 1."""
    centroid = system.centers.mean(axis=0)

    def length(theta):
        p0 = system.centers[0] + np.array([math.cos(theta), math.sin(theta)])
        p1 = rotate(p0, centroid, 2.0 * math.pi / 3.0)
        return 3.0 * float(np.hypot(*(p1 - p0)))

    return minimize_scalar(length, bounds=(0.0, math.pi / 2.0), method='bounded',
                           options={'xatol': 1e-12}).fun


def test_two_cycle_length(symmetric):
    orbit = solve_cycle(symmetric, (1, 2))
    assert orbit.length == pytest.approx(8.0, abs=1e-9)
    assert orbit.gradient_residual <= 1e-12
    np.testing.assert_allclose(orbit.segment_lengths, [4.0, 4.0], atol=1e-9)
    np.testing.assert_allclose(orbit.incidence_cosines, [1.0, 1.0], atol=1e-12)


def test_three_cycle_length(symmetric):
    orbit = solve_cycle(symmetric, (1, 2, 3))
    assert orbit.length == pytest.approx(18.0 - 3.0 * math.sqrt(3.0), abs=1e-9)
    assert orbit.length == pytest.approx(symmetric_three_cycle_oracle(symmetric), abs=1e-9)


def test_rotations_give_the_same_ray(symmetric):
    a = solve_cycle(symmetric, (1, 3, 2))
    b = solve_cycle(symmetric, (3, 2, 1))
    assert a.length == pytest.approx(b.length, abs=1e-12)
    assert a.necklace == b.necklace


def test_solver_is_deterministic(asymmetric):
    first = solve_cycle(asymmetric, (1, 2, 1, 3, 2, 3), seed=7)
    second = solve_cycle(asymmetric, (1, 2, 1, 3, 2, 3), seed=7)
    assert np.array_equal(first.angles, second.angles)
    assert first.length == second.length


def test_invalid_words(symmetric):
    with pytest.raises(ValueError, match="admissible"):
        solve_cycle(symmetric, (1, 1, 2))
    with pytest.raises(ValueError, match="primitive"):
        solve_cycle(symmetric, (1, 2, 1, 2))


def test_all_short_necklaces_solve(asymmetric):
    for m in range(2, 7):
        for necklace in enumerate_necklaces(3, m):
            orbit = solve_cycle(asymmetric, necklace)
            assert orbit.gradient_residual <= 1e-12
            assert orbit.min_hessian_eigenvalue > 0
            assert verify_admissibility(asymmetric, orbit).ok


def test_gradient_matches_finite_differences(asymmetric):
    centers = asymmetric.centers[[0, 1, 2, 1]]
    radii = asymmetric.radii[[0, 1, 2, 1]]
    theta = np.array([0.3, 2.9, -1.4, 2.2])
    _, grad, hess = length_terms(centers, radii, theta)
    h = 1e-6
    for j in range(4):
        step = np.zeros(4)
        step[j] = h
        plus, grad_plus, _ = length_terms(centers, radii, theta + step)
        minus, grad_minus, _ = length_terms(centers, radii, theta - step)
        assert grad[j] == pytest.approx((plus - minus) / (2 * h), abs=1e-7)
        np.testing.assert_allclose(hess[:, j], (grad_plus - grad_minus) / (2 * h), atol=1e-6)


def test_iterate(symmetric):
    orbit = solve_cycle(symmetric, (1, 2))
    iterate = iterate_orbit(orbit, 3)
    assert iterate.word == (1, 2, 1, 2, 1, 2)
    assert iterate.period == pytest.approx(24.0, abs=1e-9)
    with pytest.raises(ValueError):
        iterate_orbit(orbit, 0)


def test_open_path_between_two_disks(symmetric):
    path = solve_open_path(symmetric, (1, 2))
    np.testing.assert_allclose(path.segment_lengths, [4.0], atol=1e-9)


def test_open_path_is_stationary(asymmetric):
    path = solve_open_path(asymmetric, (1, 2, 3, 1, 2))
    assert path.gradient_residual <= 1e-12
    assert len(path.segment_lengths) == 4


def test_high_precision_refinement(symmetric):
    orbit = solve_cycle(symmetric, (1, 2, 3))
    refined = refine_cycle_mp(symmetric, orbit, dps=50)
    with mpmath.workdps(50):
        exact = 18 - 3 * mpmath.sqrt(3)
        assert abs(refined.length - exact) < mpmath.mpf(10) ** -35
    assert float(refined.length) == pytest.approx(orbit.length, abs=1e-12)


def coordinate_descent_length(system, word, sweeps=500):
    """Minimize the closed polygon length one boundary angle at a time."""
    centers = system.centers[np.asarray(word) - 1]
    radii = system.radii[np.asarray(word) - 1]
    m = len(word)

    def length(theta):
        points = centers + radii[:, None] * np.column_stack([np.cos(theta), np.sin(theta)])
        d = np.roll(points, -1, axis=0) - points
        return math.fsum(np.hypot(d[:, 0], d[:, 1]))

    ahead = np.roll(centers, -1, axis=0) - centers
    theta = np.arctan2(ahead[:, 1], ahead[:, 0])
    best = length(theta)
    for _ in range(sweeps):
        previous = best
        for j in range(m):
            def along(t, j=j):
                trial = theta.copy()
                trial[j] = t
                return length(trial)

            theta[j] = minimize_scalar(along, bounds=(theta[j] - 0.5, theta[j] + 0.5), method='bounded',
                                       options={'xatol': 1e-12}).x
        best = length(theta)
        if previous - best < 1e-15:
            break
    return best


def test_four_cycle_matches_coordinate_descent(symmetric):
    orbit = solve_cycle(symmetric, (1, 2, 1, 3))
    assert orbit.length == pytest.approx(coordinate_descent_length(symmetric, (1, 2, 1, 3)), abs=1e-9)


def test_solved_ray_is_stationary(asymmetric):
    orbit = solve_cycle(asymmetric, (1, 2, 1, 3, 2, 3))
    h = 1e-5
    for j in range(orbit.period):
        step = np.zeros(orbit.period)
        step[j] = h
        plus = length_terms(orbit.centers, orbit.radii, orbit.angles + step)[0]
        minus = length_terms(orbit.centers, orbit.radii, orbit.angles - step)[0]
        assert abs((plus - minus) / (2 * h)) < 1e-7


def test_time_reversal_has_the_same_length(asymmetric):
    forward = solve_cycle(asymmetric, (1, 2, 1, 2, 3))
    backward = solve_cycle(asymmetric, (3, 2, 1, 2, 1))
    assert forward.necklace != backward.necklace
    assert forward.length == pytest.approx(backward.length, abs=1e-9)


def test_perturbed_ray_is_rejected(asymmetric):
    orbit = solve_cycle(asymmetric, (1, 2, 3))
    angles = orbit.angles.copy()
    angles[1] += 0.1
    moved = orbit_from_angles(asymmetric, orbit.word, angles)
    report = verify_admissibility(asymmetric, moved)
    assert not report.ok
    assert report.max_reflection_residual > 1e-3


def test_descent_step_shortens_the_polygon(asymmetric):
    word = (1, 2, 1, 3)
    centers, radii = asymmetric.centers[[0, 1, 0, 2]], asymmetric.radii[[0, 1, 0, 2]]
    start = initial_angles(centers) + np.array([0.2, -0.25, 0.15, -0.1])
    moved = descent_step(centers, radii, start)
    assert length_terms(centers, radii, moved)[0] < length_terms(centers, radii, start)[0]
    assert solve_cycle(asymmetric, word).length < length_terms(centers, radii, moved)[0]
