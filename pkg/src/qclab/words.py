"""Breadth-first search over the group generated by a discrete gate set.

Cost of ``g_{i1}^{n1} ... g_{ik}^{nk}`` is ``sum |n_j|``, which is the length
of the same word spelled in the alphabet ``{g_i, g_i^-1}``. The engine
therefore walks reduced words over that alphabet shell by shell (shell ``l``
holds every reduced word of cost exactly ``l``), so a scan that stops at the
first shell containing a hit returns the exact minimum cost.

Letter codes: ``2i`` is ``g_i`` and ``2i + 1`` is ``g_i^-1``; ``code ^ 1`` inverts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import BudgetExceeded, FitDegenerate, InsufficientData, NotFound
from .gatesets import GateSet

__all__ = [
    "Word",
    "Approximation",
    "DiophantineReport",
    "FreeGroupCensus",
    "ComplexityScan",
    "iter_shells",
    "enumerate_group_elements",
    "gate_complexity",
    "approximate",
    "min_distance_profile",
    "min_distance_to_targets",
    "diophantine_gaps",
    "fit_diophantine_constant",
    "free_group_check",
    "cayley_growth",
    "cayley_vs_polynomial",
    "complexity_scaling_scan",
    "complexity_scaling_scans",
    "reduced_word_count",
]

DEFAULT_MEMORY_BUDGET = 2 * 1024 ** 3
CHUNK = 1 << 18


@dataclass(frozen=True)
class Word:
    """Reduced word ``g_{i1}^{n1} g_{i2}^{n2} ...`` stored as ``((i1, n1), (i2, n2), ...)``."""

    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        factors = tuple((int(i), int(n)) for i, n in self.factors)
        for k, (i, n) in enumerate(factors):
            if n == 0:
                raise ValueError("zero power in a reduced word")
            if k and factors[k - 1][0] == i:
                raise ValueError("adjacent factors share a generator")
        object.__setattr__(self, "factors", factors)

    @property
    def cost(self) -> int:
        return sum(abs(n) for _, n in self.factors)

    def __len__(self) -> int:
        return self.cost

    @classmethod
    def from_letters(cls, letters) -> "Word":
        factors: list[list[int]] = []
        for code in letters:
            code = int(code)
            gate, step = code >> 1, -1 if code & 1 else 1
            if factors and factors[-1][0] == gate:
                if (factors[-1][1] > 0) != (step > 0):
                    raise ValueError("letter sequence is not reduced")
                factors[-1][1] += step
            else:
                factors.append([gate, step])
        return cls(tuple((g, n) for g, n in factors))

    def letters(self) -> tuple[int, ...]:
        out = []
        for gate, n in self.factors:
            out.extend([2 * gate + (n < 0)] * abs(n))
        return tuple(out)

    def matrix(self, gateset: GateSet) -> np.ndarray:
        M = np.eye(gateset.dim, dtype=complex)
        for gate, n in self.factors:
            M = M @ np.linalg.matrix_power(gateset.matrices[gate], n)
        return M

    def to_json(self, gateset: GateSet) -> str:
        return json.dumps([[gateset.labels[g], n] for g, n in self.factors])

    @classmethod
    def from_json(cls, text: str, gateset: GateSet) -> "Word":
        index = {label: k for k, label in enumerate(gateset.labels)}
        return cls(tuple((index[label], int(n)) for label, n in json.loads(text)))

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return " ".join(f"g{g}^{n}" for g, n in self.factors)


def reduced_word_count(n_generators: int, cost: int) -> int:
    """Reduced words of exact cost ``l`` on ``r`` free generators: ``2r(2r-1)^(l-1)``."""
    if cost == 0:
        return 1
    return 2 * n_generators * (2 * n_generators - 1) ** (cost - 1)


class _WordTree:
    """Parent pointers for every shell; enough to rebuild any word."""

    def __init__(self):
        self.parents = [np.array([-1], dtype=np.int64)]
        self.letters = [np.array([-1], dtype=np.int8)]

    def word(self, cost: int, index: int) -> Word:
        seq = []
        for c in range(cost, 0, -1):
            seq.append(int(self.letters[c][index]))
            index = int(self.parents[c][index])
        return Word.from_letters(reversed(seq))


@dataclass
class Shell:
    cost: int
    matrices: np.ndarray
    last: np.ndarray
    tree: _WordTree = field(repr=False)

    def __len__(self) -> int:
        return len(self.matrices)

    def word(self, index: int) -> Word:
        return self.tree.word(self.cost, index)


def _extend(prev: Shell, alphabet: np.ndarray, budget: int, keep=None) -> Shell:
    r2 = len(alphabet)
    src = np.arange(len(prev)) if keep is None else np.flatnonzero(keep)
    n_new = r2 * len(src) if prev.cost == 0 else (r2 - 1) * len(src)
    d = alphabet.shape[1]
    if n_new * d * d * 16 > budget:
        raise BudgetExceeded(
            f"shell {prev.cost + 1} needs {n_new} elements of size {d}x{d}; over budget")
    mats = np.empty((n_new, d, d), dtype=complex)
    parents = np.empty(n_new, dtype=np.int64)
    letters = np.empty(n_new, dtype=np.int8)
    pos = 0
    for start in range(0, len(src), CHUNK):
        block = src[start:start + CHUNK]
        P = np.repeat(block, r2)
        B = np.tile(np.arange(r2, dtype=np.int8), len(block))
        ok = B != (prev.last[P] ^ 1)
        P, B = P[ok], B[ok]
        k = len(P)
        np.matmul(prev.matrices[P], alphabet[B], out=mats[pos:pos + k])
        parents[pos:pos + k] = P
        letters[pos:pos + k] = B
        pos += k
    tree = prev.tree
    tree.parents.append(parents)
    tree.letters.append(letters)
    return Shell(prev.cost + 1, mats, letters, tree)


def iter_shells(gateset: GateSet, max_cost: int,
                memory_budget: int = DEFAULT_MEMORY_BUDGET) -> Iterator[Shell]:
    """Yield shells ``0..max_cost``; shell ``l`` holds all reduced words of cost ``l``.

    Within a shell, words are in lexicographic order of their letter codes.
    """
    if max_cost < 0:
        raise ValueError("max_cost must be non-negative")
    alphabet = gateset.letter_matrices()
    shell = Shell(0, np.eye(gateset.dim, dtype=complex)[None], np.array([-1], dtype=np.int8),
                  _WordTree())
    yield shell
    for _ in range(max_cost):
        shell = _extend(shell, alphabet, memory_budget)
        yield shell


def _flat(mats: np.ndarray) -> np.ndarray:
    # real embedding whose Euclidean norm is the Hilbert-Schmidt norm
    n = len(mats)
    return np.concatenate([mats.real.reshape(n, -1), mats.imag.reshape(n, -1)], axis=1)


def _hs_to(mats: np.ndarray, U: np.ndarray) -> np.ndarray:
    diff = (mats - U).reshape(len(mats), -1)
    return np.sqrt(np.sum(diff.real ** 2 + diff.imag ** 2, axis=1))


def enumerate_group_elements(gateset: GateSet, max_cost: int, dedup_tol: float = 0.0,
                             memory_budget: int = DEFAULT_MEMORY_BUDGET) -> dict:
    """Map from canonical key to ``(Word, matrix)`` for every element of cost <= ``max_cost``.

    With ``dedup_tol == 0`` every reduced word is its own entry, keyed by its
    letter tuple. With ``dedup_tol > 0`` matrices closer than ``dedup_tol`` are
    merged; the survivor is the cheaper word (lexicographically first on ties),
    keys are the survivors' letter tuples, and only survivors are extended.
    """
    if dedup_tol < 0:
        raise ValueError("dedup_tol must be non-negative")
    out: dict = {}
    if dedup_tol == 0:
        for shell in iter_shells(gateset, max_cost, memory_budget):
            for k in range(len(shell)):
                w = shell.word(k)
                out[w.letters()] = (w, shell.matrices[k])
        return out

    alphabet = gateset.letter_matrices()
    shell = Shell(0, np.eye(gateset.dim, dtype=complex)[None], np.array([-1], dtype=np.int8),
                  _WordTree())
    kept_vecs = _flat(shell.matrices)
    keep = np.ones(1, dtype=bool)
    out[()] = (Word(), shell.matrices[0])
    for _ in range(max_cost):
        shell = _extend(shell, alphabet, memory_budget, keep=keep)
        vecs = _flat(shell.matrices)
        dist, _ = cKDTree(kept_vecs).query(vecs, k=1, distance_upper_bound=dedup_tol)
        keep = ~(dist < dedup_tol)
        for i, j in sorted(cKDTree(vecs).query_pairs(dedup_tol)):
            if keep[i] and keep[j]:
                keep[j] = False
        for k in np.flatnonzero(keep):
            w = shell.word(k)
            out[w.letters()] = (w, shell.matrices[k])
        kept_vecs = np.concatenate([kept_vecs, vecs[keep]])
        if not keep.any():
            break
    return out


@dataclass(frozen=True)
class Approximation:
    cost: int
    word: Word
    distance: float


def approximate(gateset: GateSet, U, epsilon: float, max_cost: int,
                memory_budget: int = DEFAULT_MEMORY_BUDGET) -> Approximation:
    """Cheapest word within ``epsilon`` of ``U`` (Hilbert-Schmidt), scanning costs upward."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    U = np.asarray(U, dtype=complex)
    for shell in iter_shells(gateset, max_cost, memory_budget):
        dist = _hs_to(shell.matrices, U)
        k = int(np.argmin(dist))
        if dist[k] < epsilon:
            return Approximation(shell.cost, shell.word(k), float(dist[k]))
    raise NotFound(f"no word of cost <= {max_cost} within {epsilon}")


def gate_complexity(gateset: GateSet, U, epsilon: float, max_cost: int,
                    memory_budget: int = DEFAULT_MEMORY_BUDGET) -> int:
    """Exact ``C_eps(U)`` if it is at most ``max_cost``; raises :class:`NotFound` otherwise."""
    return approximate(gateset, U, epsilon, max_cost, memory_budget).cost


def min_distance_profile(gateset: GateSet, targets, max_cost: int,
                         memory_budget: int = DEFAULT_MEMORY_BUDGET):
    """Closest approach of each shell to each target.

    Returns ``(dist, witnesses)``: ``dist[t, l]`` is the least Hilbert-Schmidt
    distance from target ``t`` to a word of cost exactly ``l``, and
    ``witnesses[t][l]`` the word attaining it.
    """
    targets = np.asarray(targets, dtype=complex)
    if targets.ndim == 2:
        targets = targets[None]
    dist = np.empty((len(targets), max_cost + 1))
    witnesses: list[list[Word]] = [[] for _ in targets]
    for shell in iter_shells(gateset, max_cost, memory_budget):
        for t, U in enumerate(targets):
            dd = _hs_to(shell.matrices, U)
            k = int(np.argmin(dd))
            dist[t, shell.cost] = dd[k]
            witnesses[t].append(shell.word(k))
    return dist, witnesses


def _center(d: int, targets) -> list[complex]:
    if targets is None:
        return [np.exp(2j * np.pi * k / d) for k in range(d)]
    return [complex(c) for c in targets]


def diophantine_gaps(gateset: GateSet, lengths: Sequence[int], targets=None,
                     exclude_tol: float = 1e-9,
                     memory_budget: int = DEFAULT_MEMORY_BUDGET) -> np.ndarray:
    """``min_gap(l) = min ||W_l - c 1||`` over cost-``l`` words and central ``c``.

    ``targets`` defaults to the whole center of SU(d), which for d = 2 is
    ``{+1, -1}``. Words that coincide with a central element (closer than
    ``exclude_tol``) are skipped, as the condition concerns ``W_l != c 1``.
    """
    lengths = [int(l) for l in lengths]
    if min(lengths) < 1:
        raise ValueError("lengths start at 1")
    d = gateset.dim
    centers = _center(d, targets)
    wanted = set(lengths)
    gaps = {}
    for shell in iter_shells(gateset, max(lengths), memory_budget):
        if shell.cost not in wanted:
            continue
        best = np.inf
        for c in centers:
            dd = _hs_to(shell.matrices, c * np.eye(d))
            dd = dd[dd >= exclude_tol]
            if dd.size:
                best = min(best, float(dd.min()))
        gaps[shell.cost] = best
    return np.array([gaps[l] for l in lengths])


def min_distance_to_targets(gateset: GateSet, length: int, targets=None) -> float:
    """Closest approach of cost-``length`` words to the center (``+-1`` for SU(2))."""
    return float(diophantine_gaps(gateset, [length], targets)[0])


@dataclass(frozen=True)
class DiophantineReport:
    lengths: tuple[int, ...]
    min_gaps: tuple[float, ...]
    fitted_D: float
    intercept: float
    residuals: tuple[float, ...]
    fit_residual: float
    floor_holds: bool

    def floor(self, slack: float = 10.0) -> np.ndarray:
        """``D_fit^(-l) / slack`` for every measured ``l``."""
        return self.fitted_D ** (-np.asarray(self.lengths, dtype=float)) / slack

    def to_csv_rows(self) -> list[tuple[int, float]]:
        return list(zip(self.lengths, self.min_gaps))


def fit_diophantine_constant(lengths, min_gaps, slack: float = 10.0) -> DiophantineReport:
    """Least-squares fit of ``-log min_gap(l) = l log D + b``.

    ``residuals`` are per-point relative errors of the fitted gap
    ``exp(-b) D^-l`` against the measured gap; ``fit_residual`` is the
    largest in magnitude. ``floor_holds`` checks ``min_gap(l) >= D^-l / slack``.
    """
    l = np.asarray(lengths, dtype=float)
    g = np.asarray(min_gaps, dtype=float)
    if len(l) < 4:
        raise InsufficientData("need at least four lengths")
    if np.any(g <= 0) or not np.all(np.isfinite(g)):
        raise FitDegenerate("gaps must be positive and finite")
    y = -np.log(g)
    if np.ptp(y) == 0:
        raise FitDegenerate("all gaps are equal")
    slope, b = np.polyfit(l, y, 1)
    D = float(np.exp(slope))
    fitted = np.exp(-(slope * l + b))
    rel = fitted / g - 1.0
    floor_ok = bool(np.all(g >= D ** (-l) / slack))
    return DiophantineReport(tuple(int(x) for x in l), tuple(float(x) for x in g), D, float(b),
                             tuple(float(x) for x in rel), float(np.max(np.abs(rel))), floor_ok)


@dataclass(frozen=True)
class FreeGroupCensus:
    is_free: bool
    shell_counts: tuple[int, ...]
    expected_counts: tuple[int, ...]
    collisions: tuple[tuple[Word, Word, float], ...]
    n_collisions: int


def free_group_check(gateset: GateSet, max_cost: int, tol: float = 1e-6,
                     max_reported: int = 100,
                     memory_budget: int = DEFAULT_MEMORY_BUDGET) -> FreeGroupCensus:
    """Census of distinct elements per cost over all reduced words of cost <= ``max_cost``.

    ``shell_counts[l]`` counts cost-``l`` words farther than ``tol`` from every
    earlier word (earlier = cheaper, or same cost and lexicographically
    smaller). The group looks free when there are no close pairs and every
    count equals ``2r(2r-1)^(l-1)``.
    """
    if max_cost < 1:
        raise ValueError("max_cost must be at least 1")
    shells = list(iter_shells(gateset, max_cost, memory_budget))
    sizes = [len(s) for s in shells]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    vecs = np.concatenate([_flat(s.matrices) for s in shells])
    pairs = cKDTree(vecs).query_pairs(tol, output_type="ndarray")
    dup = np.zeros(len(vecs), dtype=bool)
    if len(pairs):
        pairs = np.sort(pairs, axis=1)
        dup[pairs[:, 1]] = True

    def locate(flat_index):
        c = int(np.searchsorted(offsets, flat_index, side="right") - 1)
        return shells[c].word(int(flat_index - offsets[c]))

    reported = []
    for i, j in pairs[:max_reported] if len(pairs) else []:
        reported.append((locate(i), locate(j), float(np.linalg.norm(vecs[i] - vecs[j]))))
    counts = tuple(int(sizes[c] - dup[offsets[c]:offsets[c + 1]].sum())
                   for c in range(1, max_cost + 1))
    expected = tuple(reduced_word_count(gateset.n_gates, c) for c in range(1, max_cost + 1))
    return FreeGroupCensus(len(pairs) == 0 and counts == expected, counts, expected,
                           tuple(reported), int(len(pairs)))


def cayley_growth(r_max: int, generators: int = 2) -> list[tuple[int, int, int]]:
    """``(r, shell, ball)`` for the free group: shell ``2g(2g-1)^(r-1)``, ball = cumulative sum."""
    if generators < 2 or r_max < 1:
        raise ValueError("need generators >= 2 and r_max >= 1")
    rows, ball = [], 1
    for r in range(1, r_max + 1):
        shell = reduced_word_count(generators, r)
        ball += shell
        rows.append((r, shell, ball))
    return rows


def cayley_vs_polynomial(r_max: int, exponent: int, generators: int = 2) -> list[tuple[int, int, int]]:
    """``(r, cayley_ball, r**exponent)`` rows comparing exponential and polynomial growth."""
    return [(r, ball, r ** exponent) for r, _, ball in cayley_growth(r_max, generators)]


@dataclass(frozen=True)
class ComplexityScan:
    epsilons: tuple[float, ...]
    complexities: tuple[int | None, ...]
    witnesses: tuple[Word | None, ...]
    slope: float
    intercept: float
    lower_bound_line: tuple[float, ...] | None
    closest_distance: float = float("nan")

    def resolved(self) -> list[tuple[float, int]]:
        return [(e, c) for e, c in zip(self.epsilons, self.complexities) if c is not None]

    def to_csv_rows(self) -> list[tuple]:
        lb = self.lower_bound_line or (None,) * len(self.epsilons)
        return [(e, c, b) for e, c, b in zip(self.epsilons, self.complexities, lb)]


def _scan_from_profile(dist_row, witness_row, eps_grid, fitted_D) -> ComplexityScan:
    comps, wits = [], []
    for eps in eps_grid:
        hits = np.flatnonzero(dist_row < eps)
        if hits.size:
            comps.append(int(hits[0]))
            wits.append(witness_row[hits[0]])
        else:
            comps.append(None)
            wits.append(None)
    pts = [(e, c) for e, c in zip(eps_grid, comps) if c is not None]
    if len(pts) < 3:
        raise InsufficientData(f"only {len(pts)} grid points resolved")
    x = np.log(1.0 / np.array([e for e, _ in pts]))
    y = np.array([c for _, c in pts], dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    line = None
    if fitted_D is not None:
        line = tuple(float(np.log(1.0 / e) / np.log(fitted_D)) for e in eps_grid)
    return ComplexityScan(tuple(float(e) for e in eps_grid), tuple(comps), tuple(wits),
                          float(slope), float(intercept), line, float(np.min(dist_row)))


def _check_grid(eps_grid) -> list[float]:
    eps_grid = [float(e) for e in eps_grid]
    if any(e <= 0 for e in eps_grid) or any(b >= a for a, b in zip(eps_grid, eps_grid[1:])):
        raise ValueError("eps_grid must be positive and strictly decreasing")
    return eps_grid


def complexity_scaling_scans(gateset: GateSet, targets, eps_grid, max_cost: int,
                             diophantine: DiophantineReport | None = None,
                             memory_budget: int = DEFAULT_MEMORY_BUDGET,
                             skip_insufficient: bool = False) -> list[ComplexityScan | None]:
    """:func:`complexity_scaling_scan` for several targets sharing one enumeration.

    With ``skip_insufficient`` a target that resolves fewer than three grid
    points yields None instead of raising.
    """
    eps_grid = _check_grid(eps_grid)
    dist, wit = min_distance_profile(gateset, targets, max_cost, memory_budget)
    D = diophantine.fitted_D if diophantine is not None else None
    out = []
    for t in range(len(dist)):
        try:
            out.append(_scan_from_profile(dist[t], wit[t], eps_grid, D))
        except InsufficientData:
            if not skip_insufficient:
                raise
            out.append(None)
    return out


def complexity_scaling_scan(gateset: GateSet, U, eps_grid, max_cost: int,
                            diophantine: DiophantineReport | None = None,
                            memory_budget: int = DEFAULT_MEMORY_BUDGET) -> ComplexityScan:
    """Exact ``C_eps(U)`` on a decreasing grid and its least-squares slope against ``log(1/eps)``.

    Grid points that do not resolve within ``max_cost`` are reported as None
    and left out of the fit. ``closest_distance`` is the least distance from
    ``U`` to any word of cost <= ``max_cost``. With a Diophantine report attached, the
    comparison line ``log(1/eps) / log(D_fit)`` is included.
    """
    return complexity_scaling_scans(gateset, [U], eps_grid, max_cost, diophantine,
                                    memory_budget)[0]
