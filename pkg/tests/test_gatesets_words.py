from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qclab.errors import BudgetExceeded, DimensionCap, FitDegenerate, InsufficientData, InvalidAngle, NotFound
from qclab.gatesets import GateSet, build_local_gateset, build_su2_gateset, embed_gate, embed_two_qubit
from qclab.linalg import PAULI_Y, PAULI_Z, expi, haar_su, hs_distance, hs_norm, is_special_unitary
from qclab.words import (
    Word,
    approximate,
    cayley_growth,
    cayley_vs_polynomial,
    complexity_scaling_scan,
    diophantine_gaps,
    enumerate_group_elements,
    fit_diophantine_constant,
    free_group_check,
    gate_complexity,
    iter_shells,
    min_distance_to_targets,
    reduced_word_count,
)

A2 = build_su2_gateset(Fraction(1, 3))


def brute_force_words(gs, max_cost):
    """All reduced letter sequences up to ``max_cost`` by plain recursion (independent of BFS)."""
    alphabet = gs.letter_matrices()
    out = [((), np.eye(gs.dim, dtype=complex))]
    frontier = list(out)
    for _ in range(max_cost):
        nxt = []
        for letters, M in frontier:
            for code in range(len(alphabet)):
                if letters and code == letters[-1] ^ 1:
                    continue
                nxt.append((letters + (code,), M @ alphabet[code]))
        out.extend(nxt)
        frontier = nxt
    return out


def test_su2_gateset_entries():
    gz, gy = A2.matrices
    s = math.sqrt(8) / 3
    assert np.allclose(gz, np.diag([1 / 3 + 1j * s, 1 / 3 - 1j * s]), atol=1e-15)
    assert np.allclose(gy, [[1 / 3, s], [-s, 1 / 3]], atol=1e-15)
    assert A2.algebraic and A2.labels == ("Z", "Y")
    alpha = math.acos(1 / 3) / math.pi
    assert np.allclose(gz, expi(math.pi * alpha * PAULI_Z))
    assert np.allclose(gy, expi(math.pi * alpha * PAULI_Y))


@pytest.mark.parametrize("c", [Fraction(1, 2), Fraction(-1, 2), 0, 1, -1, Fraction(3, 2), 0.5])
def test_su2_gateset_rejects_excluded(c):
    with pytest.raises(InvalidAngle):
        build_su2_gateset(c)


def test_su2_gateset_three_fifths():
    gs = build_su2_gateset(Fraction(3, 5))
    for M in gs.matrices:
        assert np.allclose(M.conj().T @ M, np.eye(2), atol=1e-12)
        assert abs(np.linalg.det(M) - 1) < 1e-12


def test_gateset_invariants():
    with pytest.raises(ValueError):
        GateSet(("a",), (-np.eye(2),))
    with pytest.raises(ValueError):
        GateSet(("a", "a"), A2.matrices)
    with pytest.raises(ValueError):
        GateSet(("a",), (np.diag([1, 2]).astype(complex),))
    with pytest.raises(ValueError):
        A2.matrices[0][0, 0] = 0


def test_embed_gate():
    M = A2.matrices[1]
    assert np.allclose(embed_gate(M, 2, 2), M)
    E = embed_gate(M, 3, 4)
    assert np.allclose(E[1:3, 1:3], M)
    assert np.allclose(E[0, 0], 1) and np.allclose(E[3, 3], 1)
    assert np.count_nonzero(np.abs(E) > 1e-15) == 6
    with pytest.raises(IndexError):
        embed_gate(M, 1, 4)
    with pytest.raises(IndexError):
        embed_gate(M, 5, 4)


def test_embedding_preserves_distance():
    rng = np.random.default_rng(11)
    for _ in range(20):
        M, N = haar_su(2, rng), haar_su(2, rng)
        for j in (2, 3, 4):
            assert hs_distance(embed_gate(M, j, 4), embed_gate(N, j, 4)) == pytest.approx(
                hs_distance(M, N), abs=1e-12)


def test_embed_two_qubit_matches_kron():
    rng = np.random.default_rng(12)
    A, B = haar_su(2, rng), haar_su(2, rng)
    M4 = np.kron(A, B)
    I2 = np.eye(2)
    assert np.allclose(embed_two_qubit(M4, 0, 1, 3), np.kron(np.kron(A, B), I2))
    assert np.allclose(embed_two_qubit(M4, 1, 2, 3), np.kron(I2, np.kron(A, B)))
    assert np.allclose(embed_two_qubit(M4, 2, 0, 3), np.kron(np.kron(B, I2), A))


def test_local_gatesets():
    two = build_local_gateset(2, Fraction(1, 3), "ring")
    assert two.n_gates == 6 and two.dim == 4
    ring3 = build_local_gateset(3, Fraction(1, 3), "ring")
    assert ring3.n_gates == 18 and ring3.dim == 8
    for M in ring3.matrices:
        assert is_special_unitary(M)
        assert min(hs_norm(M - np.eye(8)), hs_norm(M + np.eye(8))) > 1e-6
    with pytest.raises(DimensionCap):
        build_local_gateset(4)


def test_word_validation_and_cost():
    w = Word(((0, 2), (1, -1), (0, 1)))
    assert w.cost == 4
    assert Word().cost == 0
    with pytest.raises(ValueError):
        Word(((0, 1), (0, 1)))
    with pytest.raises(ValueError):
        Word(((0, 0),))
    with pytest.raises(ValueError):
        Word.from_letters([0, 1])


@given(st.lists(st.tuples(st.integers(0, 1), st.integers(-3, 3).filter(bool)), max_size=6))
def test_word_letters_roundtrip(raw):
    factors = []
    for g, n in raw:
        if not factors or factors[-1][0] != g:
            factors.append((g, n))
    w = Word(tuple(factors))
    assert Word.from_letters(w.letters()) == w
    assert len(w.letters()) == w.cost
    assert Word.from_json(w.to_json(A2), A2) == w


def test_word_json_format():
    assert Word(((1, 2), (0, -1))).to_json(A2) == '[["Y", 2], ["Z", -1]]'


def test_enumerate_small():
    one = enumerate_group_elements(A2, 0)
    assert list(one) == [()]
    w, M = one[()]
    assert w.cost == 0 and np.allclose(M, np.eye(2))
    assert len(enumerate_group_elements(A2, 1)) == 5
    r = 5
    assert len(enumerate_group_elements(A2, r)) == 1 + sum(4 * 3 ** (l - 1) for l in range(1, r + 1))


def test_enumeration_matches_brute_force():
    brute = brute_force_words(A2, 4)
    elements = enumerate_group_elements(A2, 4)
    assert set(elements) == {letters for letters, _ in brute}
    for letters, M in brute:
        w, E = elements[letters]
        assert np.allclose(E, M, atol=1e-12)
        assert np.allclose(w.matrix(A2), M, atol=1e-12)


def test_enumerate_dedup_finite_group():
    quarter = GateSet(("iZ", "iY"), (expi(math.pi / 2 * PAULI_Z), expi(math.pi / 2 * PAULI_Y)))
    elems = enumerate_group_elements(quarter, 6, dedup_tol=1e-6)
    # <iZ, iY> is the quaternion group of order 8
    assert len(elems) == 8
    costs = sorted(w.cost for w, _ in elems.values())
    assert costs == [0, 1, 1, 1, 1, 2, 2, 2]


def test_enumerate_dedup_keeps_all_for_free_group():
    assert len(enumerate_group_elements(A2, 5, dedup_tol=1e-6)) == 1 + 4 + 12 + 36 + 108 + 324


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        list(iter_shells(A2, 12, memory_budget=10_000))


def test_gate_complexity_examples():
    g1, g2 = A2.matrices
    assert gate_complexity(A2, np.eye(2), 0.1, 5) == 0
    assert gate_complexity(A2, g1, 1e-9, 5) == 1
    assert gate_complexity(A2, g1 @ g2, 1e-9, 5) == 2
    with pytest.raises(NotFound):
        gate_complexity(A2, g1 @ g2 @ g1 @ g2, 1e-9, 3)
    with pytest.raises(ValueError):
        gate_complexity(A2, g1, 0.0, 3)


def test_gate_complexity_exact_against_brute_force():
    rng = np.random.default_rng(13)
    brute = brute_force_words(A2, 6)
    for _ in range(5):
        U = haar_su(2, rng)
        for eps in (1.0, 0.6, 0.4):
            try:
                found = approximate(A2, U, eps, 6)
            except NotFound:
                assert all(hs_distance(M, U) >= eps for _, M in brute)
                continue
            assert hs_distance(found.word.matrix(A2), U) < eps
            assert found.word.cost == found.cost
            assert all(hs_distance(M, U) >= eps for letters, M in brute if len(letters) < found.cost)


def test_gate_complexity_monotone_in_eps():
    rng = np.random.default_rng(14)
    U = haar_su(2, rng)
    values = [gate_complexity(A2, U, e, 12) for e in (0.8, 0.4, 0.2, 0.1)]
    assert values == sorted(values)


def test_min_distance_first_shell():
    assert min_distance_to_targets(A2, 1) == pytest.approx(math.sqrt(8 / 3), abs=1e-12)
    assert min_distance_to_targets(A2, 1, targets=[-1]) > math.sqrt(8 / 3)


def test_diophantine_gaps_positive_and_running_min():
    gaps = diophantine_gaps(A2, range(1, 11))
    assert np.all(gaps > 0)
    running = np.minimum.accumulate(gaps)
    assert np.all(np.diff(running) <= 0)


def test_diophantine_gaps_against_brute_force():
    brute = brute_force_words(A2, 5)
    gaps = diophantine_gaps(A2, [3, 4, 5])
    for l, g in zip([3, 4, 5], gaps):
        ref = min(min(hs_distance(M, np.eye(2)), hs_distance(M, -np.eye(2)))
                  for letters, M in brute if len(letters) == l)
        assert g == pytest.approx(ref, abs=1e-14)


def test_fit_recovers_synthetic_constant():
    l = np.arange(1, 9)
    rep = fit_diophantine_constant(l, 0.7 * 1.8 ** (-l))
    assert rep.fitted_D == pytest.approx(1.8, abs=1e-6)
    assert rep.fit_residual < 1e-9
    assert rep.floor_holds


def test_fit_errors():
    with pytest.raises(InsufficientData):
        fit_diophantine_constant([1, 2, 3], [0.5, 0.4, 0.3])
    with pytest.raises(FitDegenerate):
        fit_diophantine_constant([1, 2, 3, 4], [0.5] * 4)


def test_fit_on_a2_reports_finite_residual():
    l = list(range(1, 9))
    rep = fit_diophantine_constant(l, diophantine_gaps(A2, l))
    assert rep.fitted_D > 1
    assert math.isfinite(rep.fit_residual)
    assert len(rep.to_csv_rows()) == 8


def test_free_group_check_a2():
    census = free_group_check(A2, 8)
    assert census.is_free
    assert census.shell_counts == tuple(4 * 3 ** (l - 1) for l in range(1, 9))


def test_free_group_check_finite_order():
    quarter = GateSet(("iZ", "iY"), (expi(math.pi / 2 * PAULI_Z), expi(math.pi / 2 * PAULI_Y)))
    census = free_group_check(quarter, 4)
    assert not census.is_free
    assert census.n_collisions > 0
    assert census.shell_counts[0] == 4
    # every reported pair really coincides
    for a, b, d in census.collisions:
        assert hs_distance(a.matrix(quarter), b.matrix(quarter)) == pytest.approx(d, abs=1e-12)


def test_cayley_growth():
    rows = cayley_growth(10)
    assert [s for _, s, _ in rows[:3]] == [4, 12, 36]
    assert rows[-1][2] == 2 * 3 ** 10 - 1 == 118097
    assert rows[-1][1] / rows[-2][1] == 3
    assert reduced_word_count(3, 2) == 30
    table = cayley_vs_polynomial(10, 4)
    assert all(ball > r ** 4 for r, ball, _ in table if r >= 7)
    with pytest.raises(ValueError):
        cayley_growth(3, generators=1)


def test_scan_exact_hit_is_constant():
    g1, g2 = A2.matrices
    U = g1 @ g2 @ g2
    scan = complexity_scaling_scan(A2, U, [0.1, 0.05, 0.01, 0.001], 6)
    assert scan.complexities == (3, 3, 3, 3)
    assert scan.slope == pytest.approx(0.0, abs=1e-12)


def test_scan_nondecreasing_and_witnesses():
    rng = np.random.default_rng(15)
    U = haar_su(2, rng)
    eps = [0.5, 0.3, 0.2, 0.1]
    scan = complexity_scaling_scan(A2, U, eps, 12)
    resolved = [c for c in scan.complexities if c is not None]
    assert resolved == sorted(resolved)
    for e, c, w in zip(scan.epsilons, scan.complexities, scan.witnesses):
        if c is not None:
            assert w.cost == c and hs_distance(w.matrix(A2), U) < e


def test_scan_grid_validation():
    with pytest.raises(ValueError):
        complexity_scaling_scan(A2, np.eye(2), [0.1, 0.2, 0.05], 3)
    with pytest.raises(InsufficientData):
        complexity_scaling_scan(A2, haar_su(2, np.random.default_rng(0)), [1e-3, 1e-4, 1e-5], 3)
