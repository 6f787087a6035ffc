import numpy as np
import pytest
from numpy.testing import assert_allclose

from ulam_lab.operators import (
    MAX_DIM,
    OperatorError,
    as_operator,
    adjoint,
    block_slot,
    direct_sum,
    inner,
    operator_from_json,
    operator_norm,
    operator_to_json,
    polar_unitary_factor,
    psd_min_eig,
    random_unitary,
)


def test_operator_norm_basics():
    assert operator_norm(np.eye(5)) == pytest.approx(1.0)
    assert operator_norm(np.diag([3.0, -1.0])) == pytest.approx(3.0)
    # nilpotent: singular values are 2 and 0
    assert operator_norm([[0.0, 2.0], [0.0, 0.0]]) == pytest.approx(2.0)


def test_operator_norm_unitary_invariance():
    rng = np.random.default_rng(5)
    for _ in range(20):
        d = int(rng.integers(2, 8))
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        u, v = random_unitary(d, rng), random_unitary(d, rng)
        assert operator_norm(u @ a @ v) == pytest.approx(operator_norm(a), abs=1e-9)


def test_operator_norm_submultiplicative():
    rng = np.random.default_rng(6)
    for _ in range(20):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        b = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        assert operator_norm(a @ b) <= operator_norm(a) * operator_norm(b) + 1e-9


def test_inner_product_convention():
    x = np.array([1.0 + 1j, 2.0])
    y = np.array([0.0, 1j])
    # conjugate-linear in the second slot
    assert inner(x, y) == pytest.approx(np.sum(x * np.conj(y)))
    assert inner(x, 1j * y) == pytest.approx(-1j * inner(x, y))
    assert inner(1j * x, y) == pytest.approx(1j * inner(x, y))


def test_validation_errors():
    with pytest.raises(OperatorError):
        as_operator(np.zeros((2, 3)))
    with pytest.raises(OperatorError):
        as_operator(np.array([[np.nan]]))
    with pytest.raises(OperatorError):
        as_operator(np.zeros((MAX_DIM + 1, MAX_DIM + 1)))


def test_psd_min_eig_examples():
    assert psd_min_eig(np.eye(3)).verdict
    assert psd_min_eig(np.eye(3)).min_eigenvalue == pytest.approx(1.0)
    report = psd_min_eig(-np.eye(2))
    assert not report.verdict
    assert report.min_eigenvalue == pytest.approx(-1.0)
    c = np.cos(np.pi / 3)
    report = psd_min_eig([[1.0, c], [c, 1.0]])
    assert report.min_eigenvalue == pytest.approx(0.5, abs=1e-12)


def test_psd_min_eig_rejects_asymmetry():
    with pytest.raises(OperatorError):
        psd_min_eig([[1.0, 0.1], [0.0, 1.0]])
    # mild asymmetry below the gate is symmetrized away
    report = psd_min_eig([[1.0, 1e-8], [0.0, 1.0]])
    assert report.verdict


def test_psd_min_eig_quadratic_form():
    rng = np.random.default_rng(7)
    b = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    a = b @ adjoint(b)  # psd by construction
    report = psd_min_eig(a)
    assert report.verdict
    for _ in range(1000):
        xi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        q = inner(a @ xi, xi)
        assert q.real >= -report.tolerance * float(np.vdot(xi, xi).real)
        assert abs(q.imag) <= 1e-9 * float(np.vdot(xi, xi).real)


def test_psd_tolerance_must_be_positive():
    with pytest.raises(OperatorError):
        psd_min_eig(np.eye(2), tol=0.0)


def test_direct_sum_blocks():
    assert_allclose(direct_sum([np.eye(2), np.eye(3)]), np.eye(5))
    d = direct_sum([np.array([[2.0]]), np.array([[3.0]])])
    assert_allclose(d, np.diag([2.0, 3.0]))
    assert operator_norm(d) == pytest.approx(3.0)
    with pytest.raises(OperatorError):
        direct_sum([])


def test_direct_sum_compression_roundtrip():
    rng = np.random.default_rng(8)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    s = direct_sum([a, b])
    assert np.array_equal(block_slot(s, [2, 3], 0), a)
    assert np.array_equal(block_slot(s, [2, 3], 1), b)
    assert operator_norm(s) == pytest.approx(max(operator_norm(a), operator_norm(b)))


def test_polar_factor_is_nearest_unitary():
    rng = np.random.default_rng(9)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    u = polar_unitary_factor(a)
    assert_allclose(u @ adjoint(u), np.eye(3), atol=1e-12)
    # no random unitary beats the polar factor in Frobenius distance
    base = np.linalg.norm(a - u)
    for _ in range(50):
        v = random_unitary(3, rng)
        assert np.linalg.norm(a - v) >= base - 1e-12


def test_operator_json_roundtrip():
    rng = np.random.default_rng(10)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    data = operator_to_json(a)
    assert data["dim"] == 3
    assert np.array_equal(operator_from_json(data), a)
    with pytest.raises(OperatorError):
        operator_from_json({"dim": 2, "re": [[1.0]], "im": [[0.0]]})
