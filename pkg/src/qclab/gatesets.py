"""Discrete gate sets: the algebraic SU(2) pair, block embeddings, local sets."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DimensionCap, InvalidAngle
from .flag import all_pairs, ring_pairs
from .linalg import hs_norm, is_special_unitary
from .pauli import DENSE_QUBIT_CAP

__all__ = [
    "GateSet",
    "build_su2_gateset",
    "embed_gate",
    "embed_two_qubit",
    "build_local_gateset",
    "EXCLUDED_COSINES",
    "quaternion_su2",
    "algebraic_su2_near",
]

EXCLUDED_COSINES = frozenset(Fraction(x) for x in (0, 1, -1, Fraction(1, 2), Fraction(-1, 2)))


@dataclass(frozen=True)
class GateSet:
    """Labeled generators of a subgroup of SU(d).

    ``algebraic`` records that every matrix entry is an algebraic number; it
    is metadata only and is not checked.
    """

    labels: tuple[str, ...]
    matrices: tuple[np.ndarray, ...] = field(repr=False)
    algebraic: bool = False

    def __post_init__(self):
        if len(self.labels) != len(self.matrices) or not self.labels:
            raise ValueError("need one label per gate and at least one gate")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("gate labels must be unique")
        mats = []
        for label, M in zip(self.labels, self.matrices):
            M = np.array(M, dtype=complex)
            if M.shape != self.matrices[0].shape:
                raise ValueError("gates have different dimensions")
            if not is_special_unitary(M, 1e-10):
                raise ValueError(f"gate {label} is not in SU(d)")
            eye = np.eye(M.shape[0])
            if min(hs_norm(M - eye), hs_norm(M + eye)) < 1e-10:
                raise ValueError(f"gate {label} is central")
            M.setflags(write=False)
            mats.append(M)
        object.__setattr__(self, "matrices", tuple(mats))

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]

    @property
    def n_gates(self) -> int:
        return len(self.labels)

    def letter_matrices(self) -> np.ndarray:
        """Alphabet ``g_0, g_0^-1, g_1, g_1^-1, ...`` as a ``(2r, d, d)`` stack."""
        out = []
        for M in self.matrices:
            out.append(M)
            out.append(M.conj().T)
        return np.array(out)

    def __len__(self) -> int:
        return self.n_gates


def _as_rational(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def build_su2_gateset(cos_pi_alpha=Fraction(1, 3)) -> GateSet:
    """``{exp(i pi alpha Z), exp(i pi alpha Y)}`` for rational ``cos(pi alpha)``.

    Niven's theorem makes ``alpha`` irrational unless the cosine is one of
    0, +-1/2, +-1; those are rejected.
    """
    c = _as_rational(cos_pi_alpha)
    if c in EXCLUDED_COSINES or abs(c) >= 1:
        raise InvalidAngle(f"cos(pi*alpha) = {c} gives a rational alpha or no angle at all")
    cf = float(c)
    s = math.sqrt(1.0 - cf * cf)
    gz = np.array([[cf + 1j * s, 0], [0, cf - 1j * s]])
    gy = np.array([[cf, s], [-s, cf]], dtype=complex)
    return GateSet(("Z", "Y"), (gz, gy), algebraic=True)


def embed_gate(M, j: int, d: int) -> np.ndarray:
    """Block embedding ``diag(1_{j-2}, M, 1_{d-j})`` of a 2x2 ``M`` (1-based ``j``)."""
    M = np.asarray(M, dtype=complex)
    if M.shape != (2, 2):
        raise ValueError("embed_gate takes a 2x2 matrix")
    if not 2 <= j <= d:
        raise IndexError(f"block position j={j} outside 2..{d}")
    out = np.eye(d, dtype=complex)
    out[j - 2:j, j - 2:j] = M
    return out


def embed_two_qubit(M4, i: int, j: int, n_qubits: int) -> np.ndarray:
    """Act with the 4x4 ``M4`` on qubits ``(i, j)`` of ``n_qubits`` (qubit 0 most significant)."""
    M4 = np.asarray(M4, dtype=complex)
    if M4.shape != (4, 4) or i == j:
        raise ValueError("need a 4x4 matrix and two distinct qubits")
    if n_qubits > DENSE_QUBIT_CAP:
        raise DimensionCap(f"dense realization is capped at {DENSE_QUBIT_CAP} qubits")
    rest = [k for k in range(n_qubits) if k not in (i, j)]
    full = np.kron(M4, np.eye(2 ** len(rest)))
    # full acts on qubit order (i, j, *rest); permute axes back to (0, ..., N-1)
    order = [i, j, *rest]
    perm = np.argsort(order)
    t = full.reshape((2,) * (2 * n_qubits))
    t = t.transpose([*perm, *(n_qubits + p for p in perm)])
    return t.reshape(2 ** n_qubits, 2 ** n_qubits)


def build_local_gateset(n_qubits: int, cos_pi_alpha=Fraction(1, 3), pattern: str = "ring") -> GateSet:
    """``6K`` gates: ``beta_j(M)``, ``j = 2, 3, 4``, ``M`` in the SU(2) pair, on each of ``K`` qubit pairs."""
    if n_qubits < 2:
        raise ValueError("need at least two qubits")
    if n_qubits > DENSE_QUBIT_CAP:
        raise DimensionCap(f"dense realization is capped at {DENSE_QUBIT_CAP} qubits")
    if pattern == "ring":
        pairs = ring_pairs(n_qubits)
    elif pattern == "all-to-all":
        pairs = all_pairs(n_qubits)
    else:
        raise ValueError(f"unknown pattern {pattern!r}")
    base = build_su2_gateset(cos_pi_alpha)
    labels, mats = [], []
    for (a, b) in pairs:
        for j in (2, 3, 4):
            for label, M in zip(base.labels, base.matrices):
                labels.append(f"{label}{j}[{a},{b}]")
                mats.append(embed_two_qubit(embed_gate(M, j, 4), a, b, n_qubits))
    return GateSet(tuple(labels), tuple(mats), algebraic=True)


def quaternion_su2(a: int, b: int, c: int, d: int) -> np.ndarray:
    """SU(2) element of the integer quaternion ``a + bi + cj + dk``, normalized.

    Entries are rationals divided by ``sqrt(a^2 + b^2 + c^2 + d^2)``, hence algebraic.
    """
    n = math.sqrt(a * a + b * b + c * c + d * d)
    if n == 0:
        raise ValueError("zero quaternion")
    return np.array([[a + 1j * b, c + 1j * d], [-c + 1j * d, a - 1j * b]]) / n


def algebraic_su2_near(U, radius: float, scale: int = 40, limit: int | None = None):
    """Integer-quaternion elements within ``radius`` of ``U``, nearest first.

    Candidates round ``scale * q(U)`` to the integer lattice and try every
    offset in ``{-1, 0, 1}^4``. Returns ``(quaternion, matrix, distance)`` triples.
    """
    U = np.asarray(U, dtype=complex)
    q = np.array([U[0, 0].real, U[0, 0].imag, U[0, 1].real, U[0, 1].imag]) * scale
    base = np.rint(q).astype(int)
    seen, out = set(), []
    for off in itertools.product((-1, 0, 1), repeat=4):
        key = tuple(int(x) for x in base + off)
        if key in seen or not any(key):
            continue
        seen.add(key)
        M = quaternion_su2(*key)
        dist = hs_norm(M - U)
        if dist < radius:
            out.append((key, M, dist))
    out.sort(key=lambda t: (t[2], t[0]))
    return out[:limit] if limit is not None else out
