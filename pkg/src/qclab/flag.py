"""Easy-direction distributions and their commutator flags.

A Pauli commutator of two basis strings is a nonzero multiple of a single
basis string (or zero), so the span in each flag level is a plain set union
and all ranks are exact integers.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

from .errors import NotGenerating
from .pauli import PauliString, pauli_basis, pauli_commutator

__all__ = [
    "Distribution",
    "Flag",
    "build_distribution",
    "grow_flag",
    "box_exponent",
    "degree_of_direction",
    "ring_pairs",
    "all_pairs",
]

PATTERNS = ("all-to-all", "ring", "explicit")


def all_pairs(n: int) -> list[tuple[int, int]]:
    return list(combinations(range(n), 2))


def ring_pairs(n: int) -> list[tuple[int, int]]:
    """Nearest-neighbour pairs on a ring of ``n`` sites (a single pair for n = 2)."""
    if n < 2:
        return []
    if n == 2:
        return [(0, 1)]
    return sorted({tuple(sorted((i, (i + 1) % n))) for i in range(n)})


@dataclass(frozen=True)
class Distribution:
    n_qubits: int
    strings: frozenset[PauliString]
    pattern: str

    def __post_init__(self):
        if any(s.n_qubits != self.n_qubits for s in self.strings):
            raise ValueError("strings act on the wrong number of qubits")
        if any(s.weight < 1 for s in self.strings):
            raise ValueError("the identity is not a direction in su(d)")

    def __len__(self) -> int:
        return len(self.strings)

    def __contains__(self, p) -> bool:
        return PauliString(str(p)) in self.strings

    def sorted_strings(self) -> list[PauliString]:
        return sorted(self.strings)


def _two_local(n: int, pairs) -> set[PauliString]:
    out = set()
    for i in range(n):
        for a in "XYZ":
            letters = ["I"] * n
            letters[i] = a
            out.add(PauliString("".join(letters)))
    for i, j in pairs:
        for a, b in product("XYZ", repeat=2):
            letters = ["I"] * n
            letters[i], letters[j] = a, b
            out.add(PauliString("".join(letters)))
    return out


def build_distribution(n_qubits: int, pattern="all-to-all") -> Distribution:
    """Easy directions: all 1- and 2-body strings allowed by ``pattern``.

    ``pattern`` is ``"all-to-all"``, ``"ring"`` (2-body terms only on
    nearest neighbours of a ring) or an explicit iterable of strings such as
    ``["Y", "Z"]``.
    """
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    if isinstance(pattern, str):
        if pattern == "all-to-all":
            strings = _two_local(n_qubits, all_pairs(n_qubits))
        elif pattern == "ring":
            strings = _two_local(n_qubits, ring_pairs(n_qubits))
        else:
            raise ValueError(f"unknown pattern {pattern!r}")
        return Distribution(n_qubits, frozenset(strings), pattern)
    strings = frozenset(PauliString(str(p)) for p in pattern)
    return Distribution(n_qubits, strings, "explicit")


@dataclass(frozen=True)
class Flag:
    n_qubits: int
    pattern: str
    levels: tuple[frozenset[PauliString], ...]
    degrees: dict = field(hash=False)
    generating: bool

    @property
    def m(self) -> tuple[int, ...]:
        return tuple(len(level) for level in self.levels)

    @property
    def step(self) -> int:
        return len(self.levels)

    s = step

    @property
    def dimension(self) -> int:
        return 4 ** self.n_qubits - 1

    @property
    def hausdorff_dimension(self) -> int:
        return sum(self.degrees.values())

    n_H = hausdorff_dimension

    def degree_histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(self.degrees.values()).items()))

    def frame(self) -> list[PauliString]:
        """Basis ordered by degree, then lexicographically."""
        return sorted(self.degrees, key=lambda p: (self.degrees[p], p))

    def summary(self) -> dict:
        return {
            "N": self.n_qubits,
            "pattern": self.pattern,
            "m": list(self.m),
            "s": self.step,
            "n_H": self.hausdorff_dimension,
            "generating": self.generating,
            "degree_histogram": {str(k): v for k, v in self.degree_histogram().items()},
        }


def grow_flag(dist: Distribution) -> Flag:
    """Commutator closure ``D[k+1] = D[k] + [D, D[k]]``, one level at a time."""
    easy = dist.sorted_strings()
    current = set(easy)
    degrees = {p: 1 for p in easy}
    levels = [frozenset(current)]
    frontier = list(easy)
    k = 1
    while frontier:
        k += 1
        new = set()
        # brackets with older strings were already taken at earlier levels
        for x in easy:
            for y in frontier:
                r = pauli_commutator(x, y)
                if r is not None and r not in current:
                    new.add(r)
        if not new:
            break
        for r in new:
            degrees[r] = k
        current |= new
        levels.append(frozenset(current))
        frontier = sorted(new)
    generating = len(current) == 4 ** dist.n_qubits - 1
    return Flag(dist.n_qubits, dist.pattern, tuple(levels), degrees, generating)


def box_exponent(flag: Flag) -> int:
    """Exponent ``sum_j d_j`` of the anisotropic box volume ``r^(sum d_j)``."""
    if not flag.generating:
        raise NotGenerating("box exponent is only defined for a bracket-generating flag")
    return flag.hausdorff_dimension


def degree_of_direction(coefficients, flag: Flag, tol: float = 0.0) -> int:
    """Largest degree among the strings a direction is supported on.

    ``coefficients`` is either a mapping ``{string: value}`` or a vector
    aligned with ``pauli_basis(N)``.
    """
    if isinstance(coefficients, dict):
        support = [PauliString(str(p)) for p, v in coefficients.items() if abs(v) > tol]
    else:
        vec = np.asarray(coefficients)
        basis = pauli_basis(flag.n_qubits)
        if vec.shape != (len(basis),):
            raise ValueError("coefficient vector does not match the Pauli basis")
        support = [basis[i] for i in np.flatnonzero(np.abs(vec) > tol)]
    if not support:
        raise ValueError("zero direction has no degree")
    missing = [p for p in support if p not in flag.degrees]
    if missing:
        raise NotGenerating(f"{missing[0]} is not reached by the flag")
    return max(flag.degrees[p] for p in support)
