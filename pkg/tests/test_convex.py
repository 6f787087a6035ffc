import numpy as np
import pytest
from numpy.testing import assert_allclose

from oracle_hull import caratheodory_project
from ulam_lab.convex import (
    MEMBERSHIP_TOL,
    HullCheckResult,
    ProjectionError,
    median_witness_index,
    operator_hull_check,
    project_onto_hull,
    unvectorize_operator,
    vectorize_operator,
)
from ulam_lab.groups import FiniteGroup, ProbMeasure
from ulam_lab.repmaps import perturb_representation, regular_representation


def check_invariants(points, target, res, tol=MEMBERSHIP_TOL):
    points = np.asarray(points, dtype=float)
    target = np.asarray(target, dtype=float)
    assert isinstance(res.weights, ProbMeasure)
    lam = np.zeros(len(points))
    for i, w in res.weights.items():
        lam[i] = w
    assert_allclose(lam @ points, res.projection, atol=1e-9)
    assert res.member == (res.distance <= tol)
    assert (res.witness is None) == res.member
    # variational inequality at the returned projection
    slack = 1e-8 * (1.0 + np.max(np.sum((points - target) ** 2, axis=1)))
    inner = (points - res.projection) @ (target - res.projection)
    assert np.max(inner) <= slack


def test_segment_membership():
    points = [[-1.0], [1.0]]
    res = project_onto_hull(points, [0.3])
    assert res.member and res.distance <= 1e-9
    assert dict(res.weights.items()) == pytest.approx({0: 0.35, 1: 0.65})
    check_invariants(points, [0.3], res)


def test_segment_outside():
    points = [[-1.0], [1.0]]
    res = project_onto_hull(points, [1.5])
    assert not res.member
    assert res.distance == pytest.approx(0.5, abs=1e-9)
    assert_allclose(res.witness, [1.0], atol=1e-9)
    check_invariants(points, [1.5], res)


def test_triangle_corner():
    points = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
    target = [1.0, 1.0]
    res = project_onto_hull(points, target)
    assert not res.member
    assert_allclose(res.projection, [0.5, 0.5], atol=1e-9)
    assert res.distance == pytest.approx(np.sqrt(2) / 2, abs=1e-9)
    check_invariants(points, target, res)


def test_vertex_is_member():
    points = [[0.0, 0.0], [2.0, 0.0], [0.0, 3.0]]
    res = project_onto_hull(points, [0.0, 3.0])
    assert res.member and res.distance <= 1e-9


def test_single_and_duplicate_points():
    res = project_onto_hull([[2.0, 1.0]], [0.0, 0.0])
    assert not res.member
    assert res.distance == pytest.approx(np.sqrt(5))
    dup = project_onto_hull([[1.0], [1.0], [-1.0]], [0.2])
    assert dup.member
    check_invariants([[1.0], [1.0], [-1.0]], [0.2], dup)


def test_matches_caratheodory_oracle():
    rng = np.random.default_rng(2024)
    for trial in range(60):
        dim = int(rng.integers(1, 5))
        m = int(rng.integers(2, 10))
        points = rng.standard_normal((m, dim)) * rng.uniform(0.5, 3.0)
        target = rng.standard_normal(dim) * rng.uniform(0.5, 3.0)
        res = project_onto_hull(points, target)
        oracle_dist, oracle_point, _ = caratheodory_project(points, target)
        assert res.distance == pytest.approx(oracle_dist, abs=1e-7), f"trial {trial}"
        assert_allclose(res.projection, oracle_point, atol=1e-5)
        check_invariants(points, target, res)


def test_interior_combinations_are_members():
    rng = np.random.default_rng(7)
    for _ in range(40):
        dim = int(rng.integers(1, 5))
        m = int(rng.integers(dim + 1, dim + 6))
        points = rng.standard_normal((m, dim))
        lam = rng.dirichlet(np.ones(m))
        target = lam @ points
        res = project_onto_hull(points, target)
        assert res.member
        check_invariants(points, target, res)


def test_support_vertex_pushout_distance_is_exact():
    # pushing a support vertex outward along its supporting direction u by s
    # puts the target at hull distance exactly s
    rng = np.random.default_rng(21)
    for _ in range(40):
        dim = int(rng.integers(2, 5))
        m = int(rng.integers(3, 9))
        points = rng.standard_normal((m, dim))
        u = rng.standard_normal(dim)
        u /= np.linalg.norm(u)
        s = float(rng.uniform(0.1, 1.0))
        vertex = points[int(np.argmax(points @ u))]
        target = vertex + s * u
        res = project_onto_hull(points, target)
        assert not res.member
        assert res.distance == pytest.approx(s, abs=1e-7)
        check_invariants(points, target, res)


def test_large_instance_invariants():
    rng = np.random.default_rng(5)
    points = rng.standard_normal((400, 8))
    target = rng.standard_normal(8) * 2.0
    res = project_onto_hull(points, target)
    check_invariants(points, target, res)


def test_projection_input_validation():
    with pytest.raises(ValueError):
        project_onto_hull([[1.0, 2.0]], [1.0])
    with pytest.raises(ValueError):
        project_onto_hull(np.zeros((0, 2)), [0.0, 0.0])
    with pytest.raises(ValueError):
        project_onto_hull([[1.0]], [0.0], tol=0.0)


def test_median_witness_index():
    points = [[0.0], [4.0]]
    assert median_witness_index(points, [0.5], [3.0]) == 0
    assert median_witness_index(points, [10.0], [0.0]) is None
    # equidistant counts as a witness, first index wins
    assert median_witness_index([[1.0], [1.0]], [0.0], [2.0]) == 0


def test_vectorize_preserves_frobenius_distance():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.linalg.norm(vectorize_operator(a) - vectorize_operator(b)) == pytest.approx(
        np.linalg.norm(a - b, "fro")
    )
    assert_allclose(unvectorize_operator(vectorize_operator(a), 3), a)


def test_operator_hull_member():
    mats = [np.eye(2), np.array([[0, 1], [1, 0]]), np.diag([1, -1])]
    target = 0.25 * mats[0] + 0.25 * mats[1] + 0.5 * mats[2]
    res = operator_hull_check(mats, target, seed=11)
    assert isinstance(res, HullCheckResult)
    assert res.member
    assert res.witness_rate == 1.0
    assert res.verdicts_agree
    assert res.refuting_xi is None
    weights = dict(res.weights.items())
    assert weights == pytest.approx({0: 0.25, 1: 0.25, 2: 0.5}, abs=1e-6)


def test_operator_hull_non_member():
    mats = [np.eye(2), np.array([[0, 1], [1, 0]])]
    target = 3.0 * np.eye(2)
    res = operator_hull_check(mats, target, seed=11)
    assert not res.member
    assert res.witness_rate is None
    assert res.refutation_margin is not None
    # the constructed family defeats every point by at least distance^2
    assert res.refutation_margin >= res.distance**2 - 1e-6
    assert res.verdicts_agree
    assert res.refuting_xi.shape == (2, 2)


def test_operator_hull_accepts_operator_map():
    g = FiniteGroup.cyclic(4)
    phi = perturb_representation(regular_representation(g), 0.2, seed=6)
    identity = np.eye(4, dtype=complex)
    res = operator_hull_check(phi, identity, seed=0, trials=50)
    assert res.labels == phi.domain
    assert res.member  # phi(e) = I is one of the points
    assert res.witness_rate == 1.0


def test_operator_hull_validation():
    mats = [np.eye(2)]
    with pytest.raises(ValueError):
        operator_hull_check(mats, np.eye(3), seed=0)
    with pytest.raises(ValueError):
        operator_hull_check(mats, np.eye(2), seed=0, trials=0)


def test_witness_fails_strict_domination_raises():
    # a target just barely outside: domination must still certify, never lie
    points = [[0.0, 0.0], [1.0, 0.0]]
    target = [0.5, MEMBERSHIP_TOL * 3]
    res = project_onto_hull(points, target)
    assert not res.member
    assert res.witness is not None


def test_projection_error_is_runtime_error():
    assert issubclass(ProjectionError, RuntimeError)
