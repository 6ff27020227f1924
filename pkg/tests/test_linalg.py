from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm, logm

from qclab.errors import BranchCut, DimensionError
from qclab.linalg import (
    IDENTITY_2,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    biinvariant_distance,
    depth_lower_bound,
    euler_compose,
    euler_decompose,
    expi,
    haar_su,
    hs_distance,
    hs_norm,
    is_special_unitary,
    mat_exp,
    principal_log,
    su_log,
)


def random_hermitian(d, rng, radius=None):
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    H = (A + A.conj().T) / 2
    H -= np.trace(H) / d * np.eye(d)
    if radius is not None:
        H *= radius / np.max(np.abs(np.linalg.eigvalsh(H)))
    return H


def test_hs_norm_identity_and_zero():
    assert hs_norm(np.eye(2)) == pytest.approx(math.sqrt(2))
    assert hs_norm(np.zeros((3, 3))) == 0.0


def test_hs_norm_rotation_closed_form():
    c = 1 / 3
    s = math.sqrt(1 - c * c)
    W = np.diag([c + 1j * s, c - 1j * s])
    theta = math.acos(c)
    expected = math.sqrt(sum(2 - 2 * math.cos(t) for t in (theta, -theta)))
    assert hs_norm(W - np.eye(2)) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(math.sqrt(8 / 3), abs=1e-14)


def test_hs_norm_rejects_non_square():
    with pytest.raises(DimensionError):
        hs_norm(np.zeros((2, 3)))


def test_hs_norm_triangle_and_unitary_invariance():
    rng = np.random.default_rng(3)
    for d in (2, 4, 8):
        for _ in range(20):
            A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            B = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            U = haar_su(d, rng)
            assert hs_norm(A + B) <= hs_norm(A) + hs_norm(B) + 1e-10
            assert hs_norm(U @ A) == pytest.approx(hs_norm(A), abs=1e-10)
            assert hs_norm(A @ U) == pytest.approx(hs_norm(A), abs=1e-10)


def test_mat_exp_special_values():
    assert np.allclose(mat_exp(PAULI_Z, math.pi), -np.eye(2), atol=1e-14)
    rng = np.random.default_rng(0)
    H = random_hermitian(4, rng)
    assert np.allclose(mat_exp(H, 0.0), np.eye(4), atol=1e-15)


def test_mat_exp_matches_scipy_and_is_unitary():
    rng = np.random.default_rng(1)
    for d in (2, 4, 8):
        H = random_hermitian(d, rng)
        U = mat_exp(H, 0.7)
        assert np.allclose(U, expm(-0.7j * H), atol=1e-12)
        assert np.allclose(U.conj().T @ U, np.eye(d), atol=1e-12)
        assert is_special_unitary(U)


def test_principal_log_examples():
    assert np.allclose(principal_log(np.eye(2)), 0)
    U = np.diag([1j, -1j])
    assert np.allclose(principal_log(U), math.pi / 2 * PAULI_Z, atol=1e-14)


def test_principal_log_roundtrip_100():
    rng = np.random.default_rng(2)
    worst = 0.0
    for k in range(100):
        d = (2, 4, 8)[k % 3]
        H0 = random_hermitian(d, rng, radius=rng.uniform(0.1, 3.0))
        worst = max(worst, hs_norm(principal_log(expi(H0)) - H0))
    assert worst <= 1e-9


def test_principal_log_agrees_with_scipy_logm():
    rng = np.random.default_rng(5)
    U = haar_su(4, rng)
    assert np.allclose(1j * principal_log(U), logm(U), atol=1e-9)


def test_principal_log_branch_cut():
    with pytest.raises(BranchCut):
        principal_log(-np.eye(2))
    with pytest.raises(BranchCut):
        su_log(np.diag([-1, -1, 1, 1]).astype(complex))


def test_su_log_is_traceless_log():
    rng = np.random.default_rng(4)
    for d in (2, 4, 8):
        for _ in range(10):
            U = haar_su(d, rng)
            H, k = su_log(U)
            assert abs(np.trace(H)) < 1e-10
            assert np.allclose(expi(H), U, atol=1e-10)


def test_biinvariant_distance_examples():
    rng = np.random.default_rng(6)
    U = haar_su(2, rng)
    assert biinvariant_distance(U, U) == pytest.approx(0.0, abs=1e-12)
    assert biinvariant_distance(IDENTITY_2, expi(math.pi / 2 * PAULI_Z)) == pytest.approx(math.pi / 2)


def test_biinvariant_distance_symmetric_and_triangle():
    rng = np.random.default_rng(7)
    for d in (2, 4):
        for _ in range(100 if d == 2 else 30):
            U, V, W = (haar_su(d, rng) for _ in range(3))
            assert abs(biinvariant_distance(U, V) - biinvariant_distance(V, U)) <= 1e-10
            assert biinvariant_distance(U, W) <= (biinvariant_distance(U, V)
                                                  + biinvariant_distance(V, W) + 1e-10)


def test_biinvariant_distance_small_generator():
    rng = np.random.default_rng(8)
    for d in (2, 4, 8):
        H = random_hermitian(d, rng, radius=2.5)
        expected = math.sqrt(np.trace(H @ H).real / d)
        assert biinvariant_distance(np.eye(d), expi(H)) == pytest.approx(expected, abs=1e-9)


def test_euler_examples():
    assert np.allclose(euler_decompose(np.eye(2)), (0, 0, 0), atol=1e-14)
    chi = euler_decompose(expi(0.4 * PAULI_Y))
    assert np.allclose(chi, (0, 0.4, 0), atol=1e-12)


def test_euler_roundtrip_haar():
    rng = np.random.default_rng(9)
    for _ in range(100):
        U = haar_su(2, rng)
        c1, c2, c3 = euler_decompose(U)
        assert 0 <= c2 <= math.pi / 2 + 1e-12
        assert hs_distance(euler_compose(c1, c2, c3), U) <= 1e-9


def test_euler_diagonal_folds_third_angle():
    c1, c2, c3 = euler_decompose(expi(0.3 * PAULI_Z))
    assert (c2, c3) == (0.0, 0.0)
    assert c1 == pytest.approx(0.3)


@settings(max_examples=60, deadline=None)
@given(st.floats(-math.pi, math.pi), st.floats(0, math.pi / 2), st.floats(-math.pi, math.pi))
def test_euler_roundtrip_property(a, b, c):
    U = euler_compose(a, b, c)
    assert hs_distance(euler_compose(*euler_decompose(U)), U) <= 1e-9


def test_depth_lower_bound():
    assert depth_lower_bound(1, 2, 1) == Fraction(3, 2)
    assert depth_lower_bound(2, 15, 1) == 1
    assert depth_lower_bound(10, 100, 5) == Fraction(4 ** 10 - 1, 500)
    with pytest.raises(ValueError):
        depth_lower_bound(1, 0, 1)


def test_haar_su_members():
    rng = np.random.default_rng(10)
    for d in (2, 3, 4, 8):
        assert is_special_unitary(haar_su(d, rng))


def test_pauli_constants_anticommute():
    assert np.allclose(PAULI_X @ PAULI_Y, 1j * PAULI_Z)
