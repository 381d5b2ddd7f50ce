import math

import numpy as np
import pytest

from wfermat import (
    Absorbed,
    AtVertex,
    BoundaryConfiguration,
    Floating,
    InvalidConfiguration,
    MaxIterationsExceeded,
    classify,
    kkt_residual,
    objective,
    solve,
)
from conftest import conditioned_absorbed, conditioned_floating

EQUILATERAL = np.array([[1.0, 0.0, 0.0], [-0.5, math.sqrt(3) / 2, 0.0], [-0.5, -math.sqrt(3) / 2, 0.0]])
REG_TETRA = np.array([[1.0, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]])


def test_configuration_validation():
    with pytest.raises(InvalidConfiguration):
        BoundaryConfiguration(vertices=np.zeros((2, 3)), weights=np.ones(2))
    with pytest.raises(InvalidConfiguration):
        BoundaryConfiguration(vertices=np.zeros((6, 3)), weights=np.ones(6))
    with pytest.raises(InvalidConfiguration):  # negative weight
        BoundaryConfiguration(vertices=REG_TETRA, weights=np.array([1, 1, 1, -0.1]))
    with pytest.raises(InvalidConfiguration):  # fewer than two positive weights
        BoundaryConfiguration(vertices=EQUILATERAL, weights=np.array([1.0, 0, 0]))
    with pytest.raises(InvalidConfiguration):  # coincident vertices
        BoundaryConfiguration(
            vertices=np.array([[0, 0, 0], [0, 0, 0], [1, 0, 0]]), weights=np.ones(3)
        )
    with pytest.raises(InvalidConfiguration):  # collinear
        BoundaryConfiguration(
            vertices=np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0]]), weights=np.ones(3)
        )
    with pytest.raises(InvalidConfiguration):
        solve(BoundaryConfiguration(vertices=EQUILATERAL, weights=np.ones(3)), tol=0.0)


def test_equilateral_unit_weights():
    config = BoundaryConfiguration(vertices=EQUILATERAL, weights=np.ones(3))
    sol = solve(config, tol=1e-12)
    assert isinstance(sol.case, Floating)
    assert np.linalg.norm(sol.point) < 1e-12
    assert sol.kkt_residual <= 1e-12
    assert abs(sol.objective - 3.0) < 1e-12


def test_regular_tetrahedron_center():
    config = BoundaryConfiguration(vertices=REG_TETRA, weights=np.ones(4))
    sol = solve(config, tol=1e-12)
    assert isinstance(sol.case, Floating)
    assert np.linalg.norm(sol.point) < 1e-10
    assert abs(sol.objective - 4.0 * math.sqrt(3)) < 1e-10


def test_absorbed_heavy_vertex():
    config = BoundaryConfiguration(vertices=REG_TETRA, weights=np.array([10.0, 1, 1, 1]))
    case = classify(config)
    assert case == Absorbed(vertex=1)
    sol = solve(config)
    assert sol.case == Absorbed(vertex=1)
    assert np.array_equal(sol.point, REG_TETRA[0])
    assert sol.kkt_residual == 0.0
    # the absorbed vertex is a genuine minimizer: probing nearby never improves
    rng = np.random.default_rng(0)
    for _ in range(50):
        probe = REG_TETRA[0] + 0.1 * rng.normal(size=3)
        assert objective(config, probe) >= sol.objective - 1e-12


def test_classify_matches_solve():
    rng = np.random.default_rng(101)
    for n in (3, 4, 5):
        for _ in range(15):
            config, sol = conditioned_floating(rng, n)
            assert isinstance(classify(config), Floating)
            assert isinstance(sol.case, Floating)
        for _ in range(15):
            config, vertex = conditioned_absorbed(rng, n)
            sol = solve(config)
            assert sol.case == Absorbed(vertex=vertex)


def test_solution_beats_random_probes():
    rng = np.random.default_rng(55)
    for _ in range(10):
        config, sol = conditioned_floating(rng, 4)
        for _ in range(50):
            probe = sol.point + rng.normal(size=3) * config.diameter * 0.2
            assert objective(config, probe) >= sol.objective - 1e-12


def test_translation_and_scale_equivariance():
    rng = np.random.default_rng(77)
    config, sol = conditioned_floating(rng, 4)
    shift = np.array([100.0, -3.0, 7.0])
    scale = 250.0
    moved = BoundaryConfiguration(
        vertices=config.vertices * scale + shift, weights=config.weights
    )
    sol2 = solve(moved, tol=1e-10)
    assert np.linalg.norm(sol2.point - (sol.point * scale + shift)) < 1e-6 * scale


def test_kkt_residual_at_vertex_raises():
    config = BoundaryConfiguration(vertices=EQUILATERAL, weights=np.ones(3))
    with pytest.raises(AtVertex):
        kkt_residual(config, EQUILATERAL[1])
    # off-vertex it matches the norm of the weighted unit sum
    assert kkt_residual(config, [0, 0, 0]) < 1e-15


def test_x0_and_max_iter():
    config = BoundaryConfiguration(vertices=REG_TETRA, weights=np.array([2.0, 1, 1, 1]))
    sol = solve(config, tol=1e-12)
    warm = solve(config, tol=1e-12, x0=sol.point)
    assert np.linalg.norm(warm.point - sol.point) < 1e-10
    with pytest.raises(MaxIterationsExceeded) as info:
        solve(config, tol=1e-15, max_iter=2, x0=config.vertices.mean(axis=0) + 0.7)
    assert info.value.best_point is not None
    assert info.value.kkt_residual > 0


def test_x0_on_vertex_recovers():
    # starting exactly on a non-absorbing vertex must step off and converge
    config = BoundaryConfiguration(vertices=REG_TETRA, weights=np.array([2.0, 1, 1, 1]))
    sol = solve(config, tol=1e-11, x0=REG_TETRA[1])
    ref = solve(config, tol=1e-11)
    assert isinstance(sol.case, Floating)
    assert np.linalg.norm(sol.point - ref.point) < 1e-8


def test_two_dimensional_input_stays_planar():
    rng = np.random.default_rng(13)
    for _ in range(10):
        config, sol = conditioned_floating(rng, 4, planar=True)
        assert abs(sol.point[2]) < 1e-12
