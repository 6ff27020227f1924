"""Pauli strings: symbolic products and commutators, plus dense realizations."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce
from itertools import product

import numpy as np

from .errors import DimensionCap
from .linalg import IDENTITY_2, PAULI_X, PAULI_Y, PAULI_Z

__all__ = [
    "PauliString",
    "pauli_basis",
    "pauli_product",
    "pauli_commutator",
    "basis_matrices",
    "DENSE_QUBIT_CAP",
]

DENSE_QUBIT_CAP = 3

LETTERS = "IXYZ"
_MATS = {"I": IDENTITY_2, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}
# single-letter product table: a*b = phase * c
_PROD = {
    ("X", "Y"): (1j, "Z"), ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"), ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"), ("X", "Z"): (-1j, "Y"),
}


@dataclass(frozen=True, order=True)
class PauliString:
    letters: str

    def __post_init__(self):
        if not self.letters or any(c not in LETTERS for c in self.letters):
            raise ValueError(f"invalid Pauli string {self.letters!r}")

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        return sum(c != "I" for c in self.letters)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.letters) if c != "I")

    def is_identity(self) -> bool:
        return self.weight == 0

    def matrix(self) -> np.ndarray:
        if self.n_qubits > DENSE_QUBIT_CAP:
            raise DimensionCap(f"dense Pauli matrices are capped at {DENSE_QUBIT_CAP} qubits")
        return _dense(self.letters)

    def commutes_with(self, other: PauliString) -> bool:
        clashes = sum(a != "I" and b != "I" and a != b
                      for a, b in zip(self.letters, other.letters))
        return clashes % 2 == 0

    def __str__(self) -> str:
        return self.letters


@lru_cache(maxsize=None)
def _dense(letters: str) -> np.ndarray:
    M = reduce(np.kron, (_MATS[c] for c in letters))
    M.setflags(write=False)
    return M


def _coerce(p) -> PauliString:
    return p if isinstance(p, PauliString) else PauliString(str(p))


def pauli_product(p, q) -> tuple[complex, PauliString]:
    """``P Q = phase * R`` computed letter by letter."""
    p, q = _coerce(p), _coerce(q)
    if p.n_qubits != q.n_qubits:
        raise ValueError("Pauli strings act on different numbers of qubits")
    phase = 1 + 0j
    out = []
    for a, b in zip(p.letters, q.letters):
        if a == "I":
            out.append(b)
        elif b == "I":
            out.append(a)
        elif a == b:
            out.append("I")
        else:
            ph, c = _PROD[(a, b)]
            phase *= ph
            out.append(c)
    return phase, PauliString("".join(out))


def pauli_commutator(p, q) -> PauliString | None:
    """String ``R`` with ``[P, Q]`` proportional to ``R``, or None when they commute.

    The nonzero commutator equals ``2 * phase * R`` where ``P Q = phase * R``.
    """
    p, q = _coerce(p), _coerce(q)
    if p.n_qubits != q.n_qubits:
        raise ValueError("Pauli strings act on different numbers of qubits")
    if p.commutes_with(q):
        return None
    return pauli_product(p, q)[1]


@lru_cache(maxsize=None)
def _basis(n_qubits: int) -> tuple[PauliString, ...]:
    return tuple(PauliString("".join(t)) for t in product(LETTERS, repeat=n_qubits)
                 if any(c != "I" for c in t))


def pauli_basis(n_qubits: int) -> list[PauliString]:
    """All ``4^N - 1`` non-identity strings in lexicographic (I < X < Y < Z) order."""
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    return list(_basis(n_qubits))


@lru_cache(maxsize=None)
def basis_matrices(n_qubits: int) -> np.ndarray:
    """Dense stack of shape ``(4^N - 1, 2^N, 2^N)`` aligned with :func:`pauli_basis`."""
    if n_qubits > DENSE_QUBIT_CAP:
        raise DimensionCap(f"dense Pauli matrices are capped at {DENSE_QUBIT_CAP} qubits")
    stack = np.array([p.matrix() for p in _basis(n_qubits)])
    stack.setflags(write=False)
    return stack
