from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qclab.errors import DimensionCap, NotGenerating
from qclab.flag import (
    all_pairs,
    box_exponent,
    build_distribution,
    degree_of_direction,
    grow_flag,
    ring_pairs,
)
from qclab.pauli import PauliString, basis_matrices, pauli_basis, pauli_commutator, pauli_product

strings = lambda n: st.text(alphabet="IXYZ", min_size=n, max_size=n)


def test_pauli_string_fields():
    p = PauliString("XIZ")
    assert p.n_qubits == 3
    assert p.weight == 2
    assert p.support == (0, 2)
    assert PauliString("II").is_identity


def test_pauli_string_rejects_bad_letters():
    with pytest.raises(ValueError):
        PauliString("XA")


def test_dense_matrix_properties():
    for n in (1, 2, 3):
        for p in pauli_basis(n):
            M = p.matrix()
            d = 2 ** n
            assert np.allclose(M, M.conj().T)
            assert abs(np.trace(M)) < 1e-12
            assert np.allclose(M @ M, np.eye(d))
    with pytest.raises(DimensionCap):
        PauliString("XXXX").matrix()


def test_pauli_basis_sizes_and_order():
    assert [str(p) for p in pauli_basis(1)] == ["X", "Y", "Z"]
    b2 = pauli_basis(2)
    assert len(b2) == 15
    assert [str(p) for p in b2] == sorted(str(p) for p in b2)


def test_pauli_basis_orthogonal_n2():
    P = basis_matrices(2)
    gram = np.einsum("aij,bji->ab", P, P)
    assert np.allclose(gram, 4 * np.eye(15))


@given(strings(3), strings(3))
def test_product_matches_dense(a, b):
    p, q = PauliString(a), PauliString(b)
    phase, r = pauli_product(p, q)
    assert np.allclose(p.matrix() @ q.matrix(), phase * r.matrix())


@given(strings(2), strings(2))
def test_commutator_matches_dense(a, b):
    p, q = PauliString(a), PauliString(b)
    dense = p.matrix() @ q.matrix() - q.matrix() @ p.matrix()
    r = pauli_commutator(p, q)
    if r is None:
        assert np.allclose(dense, 0)
    else:
        coeff = np.trace(r.matrix() @ dense) / 4
        assert abs(abs(coeff) - 2) < 1e-12
        assert np.allclose(dense, coeff * r.matrix())


def test_commutator_examples():
    assert pauli_commutator("Y", "Z") == PauliString("X")
    assert pauli_commutator("XX", "YY") is None
    assert pauli_commutator("XI", "ZI") == PauliString("YI")


def test_pairs():
    assert ring_pairs(2) == [(0, 1)]
    assert ring_pairs(4) == [(0, 1), (0, 3), (1, 2), (2, 3)]
    assert len(all_pairs(5)) == 10


def test_distribution_sizes():
    assert len(build_distribution(2, "all-to-all")) == 15
    assert len(build_distribution(3, "all-to-all")) == 9 + 27
    assert len(build_distribution(4, "ring")) == 12 + 36
    assert len(build_distribution(1, ["Y", "Z"])) == 2
    with pytest.raises(ValueError):
        build_distribution(2, "star")


@pytest.mark.parametrize("n, pattern, m, n_h", [
    (1, ["Y", "Z"], (2, 3), 4),
    (2, "all-to-all", (15,), 15),
    (3, "all-to-all", (36, 63), 90),
    (3, "ring", (36, 63), 90),
    (4, "all-to-all", (66, 174, 255), 525),
    (4, "ring", (48, 156, 255), 561),
    (5, "all-to-all", (105, 375, 780, 1023), 2832),
    (5, "ring", (60, 195, 645, 1023), 3192),
])
def test_flag_values(n, pattern, m, n_h):
    flag = grow_flag(build_distribution(n, pattern))
    assert flag.m == m
    assert flag.step == len(m)
    assert flag.hausdorff_dimension == n_h
    assert flag.generating
    assert box_exponent(flag) == n_h


def test_flag_summary_json_fields():
    s = grow_flag(build_distribution(1, ["Y", "Z"])).summary()
    assert s["s"] == 2 and s["n_H"] == 4 and s["m"] == [2, 3]
    assert s["degree_histogram"] == {"1": 2, "2": 1}


def test_flag_monotone_and_dimension_relation():
    cases = [(1, ["Y", "Z"])] + [(n, p) for n in (2, 3, 4) for p in ("all-to-all", "ring")]
    for n, pattern in cases:
        flag = grow_flag(build_distribution(n, pattern))
        assert all(a < b for a, b in zip(flag.m, flag.m[1:]))
        assert all(a <= b for a, b in zip(flag.levels, flag.levels[1:]))
        if flag.step > 1:
            assert flag.hausdorff_dimension > flag.dimension
        else:
            assert flag.hausdorff_dimension == flag.dimension


def test_locality_raises_hausdorff_dimension():
    for n in (4, 5):
        ring = grow_flag(build_distribution(n, "ring")).hausdorff_dimension
        full = grow_flag(build_distribution(n, "all-to-all")).hausdorff_dimension
        assert ring > full


def _dense_levels(dist):
    """Levelwise spans of dense commutators, via SVD ranks and orthonormal bases."""
    n = dist.n_qubits
    easy = np.array([p.matrix() for p in dist.sorted_strings()])
    span = easy.reshape(len(easy), -1)
    ranks = [np.linalg.matrix_rank(span)]
    while True:
        _, s, vh = np.linalg.svd(span, full_matrices=False)
        basis = vh[s > 1e-9 * s[0]].reshape(-1, 2 ** n, 2 ** n)
        comms = np.einsum("aij,bjk->abik", easy, basis) - np.einsum("bij,ajk->abik", basis, easy)
        span = np.concatenate([basis.reshape(len(basis), -1),
                               comms.reshape(-1, 4 ** n)])
        r = np.linalg.matrix_rank(span, tol=1e-9 * np.linalg.norm(span, 2))
        if r == ranks[-1]:
            return ranks
        ranks.append(r)


@pytest.mark.parametrize("n, pattern", [(1, ["Y", "Z"]), (1, ["Z"]), (2, "all-to-all"),
                                        (2, ["XI", "IZ", "ZZ"]), (3, "all-to-all"), (3, "ring")])
def test_flag_matches_dense_rank_oracle(n, pattern):
    dist = build_distribution(n, pattern)
    assert list(grow_flag(dist).m) == _dense_levels(dist)


def test_non_generating_distribution():
    flag = grow_flag(build_distribution(1, ["Z"]))
    assert not flag.generating
    with pytest.raises(NotGenerating):
        box_exponent(flag)


def test_degree_of_direction():
    flag = grow_flag(build_distribution(1, ["Y", "Z"]))
    assert degree_of_direction({"X": 1.0}, flag) == 2
    assert degree_of_direction({"Z": 0.3, "Y": -1.0}, flag) == 1
    assert degree_of_direction(np.array([0.1, 1.0, 0.0]), flag) == 2
    assert [str(p) for p in flag.frame()] == ["Y", "Z", "X"]
    with pytest.raises(ValueError):
        degree_of_direction({"X": 0.0}, flag)
    small = grow_flag(build_distribution(1, ["Z"]))
    with pytest.raises(NotGenerating):
        degree_of_direction({"X": 1.0}, small)
