"""Dense linear algebra on SU(d) for d <= 8.

Exponentials and logarithms go through eigendecompositions, which at these
sizes are exact to machine precision and keep the branch choice explicit.
The principal branch puts eigenphases in (-pi, pi].
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy.linalg import schur

from .errors import BranchCut, DimensionError

__all__ = [
    "hs_norm",
    "hs_distance",
    "mat_exp",
    "expi",
    "principal_log",
    "su_log",
    "eigenphases",
    "biinvariant_distance",
    "euler_decompose",
    "euler_compose",
    "depth_lower_bound",
    "is_special_unitary",
    "haar_su",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "IDENTITY_2",
]

IDENTITY_2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

BRANCH_TOL = 1e-12


def _square(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    return A


def hs_norm(A) -> float:
    """Hilbert-Schmidt norm ``sqrt(Tr(A^dagger A))``."""
    A = _square(A)
    return float(np.sqrt(np.sum(np.abs(A) ** 2)))


def hs_distance(A, B) -> float:
    return hs_norm(np.asarray(A) - np.asarray(B))


def is_special_unitary(U, tol: float = 1e-10) -> bool:
    U = _square(U)
    d = U.shape[0]
    return (hs_norm(U.conj().T @ U - np.eye(d)) <= tol
            and abs(np.linalg.det(U) - 1.0) <= tol)


def _check_hermitian(H: np.ndarray, tol: float = 1e-12) -> None:
    if hs_norm(H - H.conj().T) > tol * max(1.0, hs_norm(H)):
        raise ValueError("matrix is not Hermitian")


def mat_exp(H, t: float = 1.0) -> np.ndarray:
    """Return ``exp(-i H t)`` for Hermitian ``H``."""
    H = _square(H)
    _check_hermitian(H)
    w, Q = np.linalg.eigh(H)
    return (Q * np.exp(-1j * w * t)) @ Q.conj().T


def expi(H) -> np.ndarray:
    """Return ``exp(i H)``; the inverse of :func:`principal_log`."""
    return mat_exp(H, -1.0)


def _unitary_eig(U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Complex Schur of a normal matrix is diagonal with unitary Z.
    T, Z = schur(U, output="complex")
    return np.diag(T).copy(), Z


def eigenphases(U) -> np.ndarray:
    """Principal eigenphases of a unitary, each in (-pi, pi]."""
    lam, _ = _unitary_eig(_square(U))
    phases = np.angle(lam)
    phases[phases <= -np.pi] += 2 * np.pi
    return phases


def principal_log(U) -> np.ndarray:
    """Hermitian ``H`` with eigenvalues in (-pi, pi] and ``exp(iH) = U``.

    Raises :class:`BranchCut` if an eigenvalue lies within 1e-12 (in phase)
    of -1, where the branch is ambiguous.
    """
    U = _square(U)
    lam, Z = _unitary_eig(U)
    phases = np.angle(lam)
    if np.any(np.pi - np.abs(phases) < BRANCH_TOL):
        raise BranchCut("eigenvalue at -1: principal logarithm is ambiguous")
    H = (Z * phases) @ Z.conj().T
    return 0.5 * (H + H.conj().T)


def _su_phases(phases: np.ndarray) -> tuple[np.ndarray, int]:
    """Shift the largest phases by -2*pi (or smallest by +2*pi) until they sum to zero.

    For a determinant-one matrix the principal phases sum to ``2*pi*k``; removing
    ``k`` full turns from the ``|k|`` most extreme phases is the minimum-norm
    traceless choice.
    """
    k = int(np.rint(phases.sum() / (2 * np.pi)))
    out = phases.copy()
    if k > 0:
        out[np.argsort(out)[::-1][:k]] -= 2 * np.pi
    elif k < 0:
        out[np.argsort(out)[:-k]] += 2 * np.pi
    return out, k


def su_log(U) -> tuple[np.ndarray, int]:
    """Traceless Hermitian ``H`` of least norm with ``exp(iH) = U`` for ``U`` in SU(d).

    Returns ``(H, k)`` where ``2*pi*k`` is the trace of the principal logarithm,
    i.e. the number of turns moved off the principal branch.
    """
    U = _square(U)
    lam, Z = _unitary_eig(U)
    phases = np.angle(lam)
    if np.any(np.pi - np.abs(phases) < BRANCH_TOL):
        raise BranchCut("eigenvalue at -1: principal logarithm is ambiguous")
    if abs(np.prod(lam) - 1.0) > 1e-8:
        raise DimensionError("su_log needs a determinant-one matrix")
    shifted, k = _su_phases(phases)
    H = (Z * shifted) @ Z.conj().T
    return 0.5 * (H + H.conj().T), k


def biinvariant_distance(U, V) -> float:
    """Geodesic distance ``[sum_j theta_j^2 / d]^(1/2)`` under ``<H1,H2> = Tr(H1 H2)/d``.

    ``theta_j`` are the eigenphases of ``U^dagger V``. When ``U^dagger V`` has unit
    determinant and its principal phases wrap (sum to a nonzero multiple of
    2*pi), the least-norm traceless branch is used, so the value is the
    SU(d) geodesic distance.
    """
    U = _square(U)
    V = _square(V)
    if U.shape != V.shape:
        raise DimensionError("dimension mismatch")
    W = U.conj().T @ V
    lam, _ = _unitary_eig(W)
    phases = np.angle(lam)
    if np.any(np.pi - np.abs(phases) < BRANCH_TOL):
        raise BranchCut("eigenvalue of U^dagger V at -1")
    if abs(np.prod(lam) - 1.0) < 1e-8:
        phases, _ = _su_phases(phases)
    return float(np.sqrt(np.sum(phases ** 2) / U.shape[0]))


def euler_compose(chi1: float, chi2: float, chi3: float) -> np.ndarray:
    """``exp(i chi1 Z) exp(i chi2 Y) exp(i chi3 Z)``."""
    c, s = np.cos(chi2), np.sin(chi2)
    return np.array([
        [np.exp(1j * (chi1 + chi3)) * c, np.exp(1j * (chi1 - chi3)) * s],
        [-np.exp(-1j * (chi1 - chi3)) * s, np.exp(-1j * (chi1 + chi3)) * c],
    ])


def euler_decompose(U, tol: float = 1e-12) -> tuple[float, float, float]:
    """ZYZ Euler angles with ``chi2`` in [0, pi/2].

    Writing ``U = [[a, b], [-conj(b), conj(a)]]``, ``cos chi2 = |a|``,
    ``chi1 + chi3 = arg a`` and ``chi1 - chi3 = arg b``. If either ``a`` or ``b``
    vanishes the free combination is fixed by ``chi3 = 0``.
    """
    U = _square(U)
    if U.shape != (2, 2):
        raise DimensionError("euler_decompose needs a 2x2 matrix")
    a, b = U[0, 0], U[0, 1]
    chi2 = float(np.arctan2(abs(b), abs(a)))
    if abs(b) < tol:
        return float(np.angle(a)), 0.0, 0.0
    if abs(a) < tol:
        return float(np.angle(b)), chi2, 0.0
    plus, minus = np.angle(a), np.angle(b)
    return float((plus + minus) / 2), chi2, float((plus - minus) / 2)


def depth_lower_bound(n_qubits: int, n_params: int, width: int) -> Fraction:
    """Generic circuit-depth bound ``dim SU(2^N) / (K W) = (4^N - 1) / (K W)``."""
    if n_params < 1 or width < 1:
        raise ValueError("K and W must be positive")
    if n_qubits < 1:
        raise ValueError("N must be positive")
    return Fraction(4 ** n_qubits - 1, n_params * width)


def haar_su(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random element of SU(d) (QR of a Ginibre matrix, phases fixed)."""
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))
    det = np.linalg.det(Q)
    return Q / det ** (1.0 / d)
