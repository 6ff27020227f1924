"""Gate complexity on U(1) for the single generator ``exp(i alpha)``.

``u1_complexity`` is a direct scan over powers and is the ground truth.
``first_return_oracle`` answers the same question with exact integer
arithmetic through a Euclidean (continued-fraction) recursion, and is used
only to cross-check the scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InsufficientData, NotFound

__all__ = [
    "CirclePoint",
    "ContinuedFraction",
    "continued_fraction",
    "u1_complexity",
    "u1_complexity_with_witness",
    "first_return_oracle",
    "chain_check",
    "U1Scan",
    "u1_scaling_scan",
]

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class CirclePoint:
    phase: float

    def __post_init__(self):
        object.__setattr__(self, "phase", float(self.phase) % TWO_PI)

    def __float__(self) -> float:
        return self.phase


@dataclass(frozen=True)
class ContinuedFraction:
    value: float
    partial_quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    terminated: bool
    truncated: bool


def continued_fraction(x: float, depth: int = 40) -> ContinuedFraction:
    """Expansion ``[a0; a1, a2, ...]`` of ``x`` with its convergents ``p/q``.

    The expansion runs in exact rational arithmetic on the binary value of
    ``x`` and stops once a convergent reproduces ``x`` to double precision
    (``terminated``) or after ``depth`` quotients (``truncated``).
    """
    if depth < 1 or depth > 40:
        raise ValueError("depth must be in 1..40")
    exact = Fraction(x)
    tol = Fraction(4 * np.finfo(float).eps) * max(1, abs(exact))
    rem = exact
    quotients: list[int] = []
    convergents: list[tuple[int, int]] = []
    p0, q0, p1, q1 = 1, 0, 0, 1
    terminated = False
    for _ in range(depth):
        a = math.floor(rem)
        quotients.append(a)
        p0, q0, p1, q1 = a * p0 + p1, a * q0 + q1, p0, q0
        convergents.append((p0, q0))
        frac = rem - a
        if frac == 0 or abs(exact - Fraction(p0, q0)) <= tol:
            terminated = True
            break
        rem = 1 / frac
    return ContinuedFraction(float(x), tuple(quotients), tuple(convergents),
                             terminated, not terminated)


def _hits(phi: float, alpha: float, eps: float, n: np.ndarray) -> np.ndarray:
    return np.abs(np.exp(1j * phi) - np.exp(1j * ((n * alpha) % TWO_PI))) < eps


def u1_complexity_with_witness(phi, alpha: float, eps: float, n_max: int) -> int:
    """Signed power ``n`` of least ``|n|`` with ``|e^{i phi} - e^{i n alpha}| < eps``.

    Ties in ``|n|`` go to the positive power.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    phi = float(CirclePoint(float(phi)))
    mags = np.arange(n_max + 1)
    pos = _hits(phi, alpha, eps, mags)
    neg = _hits(phi, alpha, eps, -mags)
    either = pos | neg
    if not either.any():
        raise NotFound(f"no power |n| <= {n_max} within {eps}")
    k = int(np.argmax(either))
    return k if pos[k] else -k


def u1_complexity(phi, alpha: float, eps: float, n_max: int) -> int:
    """``C_eps(e^{i phi}) = min{|n| : |e^{i phi} - e^{i n alpha}| < eps}`` by direct scan."""
    return abs(u1_complexity_with_witness(phi, alpha, eps, n_max))


def _first_in_range(a: int, m: int, lo: int, hi: int) -> int | None:
    """Least ``k >= 0`` with ``lo <= (a k) mod m <= hi``, for ``0 <= lo <= hi < m``.

    Each recursive step swaps ``(a, m)`` for ``(-m mod a, a)``, the Euclidean
    step that generates the continued fraction of ``a/m``.
    """
    if lo == 0:
        return 0
    a %= m
    if a == 0:
        return None
    if 2 * a > m:
        # reflect x -> m - x so the modulus at least halves each level
        return _first_in_range(m - a, m, m - hi, m - lo)
    k = -(-lo // a)
    if a * k <= hi:
        return k
    # [lo, hi] holds no multiple of a; wrap once per extra multiple of m
    y = _first_in_range((-m) % a, a, lo % a, hi % a)
    if y is None:
        return None
    return -(-(lo + m * y) // a)


def _one_sided(a: int, m: int, target: int, width: int) -> int | None:
    # least k >= 0 with (a k - target) mod m in [-width, width]
    lo = (target - width) % m
    hi = lo + 2 * width
    if 2 * width + 1 >= m:
        return 0
    if hi < m:
        return _first_in_range(a, m, lo, hi)
    cands = [_first_in_range(a, m, lo, m - 1), _first_in_range(a, m, 0, hi - m)]
    cands = [c for c in cands if c is not None]
    return min(cands) if cands else None


def first_return_oracle(phi: float, alpha: float, eps: float) -> int | None:
    """Least ``|n|`` with ``||phi/2pi - n alpha/2pi|| < arcsin(eps/2)/pi``, exactly.

    ``||.||`` is distance to the nearest integer; the window is the same
    condition as ``|e^{i phi} - e^{i n alpha}| < eps``. Inputs are taken at
    their exact binary values, so the answer is exact for those rationals.
    Returns None when no power qualifies (rational rotation).
    """
    if eps >= 2:
        return 0
    x = Fraction(alpha / TWO_PI) % 1
    y = Fraction(phi / TWO_PI) % 1
    eta = Fraction(math.asin(eps / 2) / math.pi)
    m = math.lcm(x.denominator, y.denominator, eta.denominator)
    a, t = int(x * m), int(y * m)
    # strict inequality: integer offsets < eta*m
    width = math.ceil(eta * m) - 1
    best = None
    for sign in (1, -1):
        k = _one_sided((sign * a) % m, m, t, width)
        if k is not None and (best is None or k < best):
            best = k
    return best


def chain_check(phi: float, alpha: float, n: int, eps: float) -> bool:
    """Check the wrap-around chain for an accepted power ``n``.

    ``|sin((phi - n alpha)/2)| < eps/2`` and, with ``m`` the integer in
    ``[(phi - n alpha)/2pi - 1/2, (phi - n alpha)/2pi + 1/2)``,
    ``|phi/2pi - n alpha/2pi - m| < eps/4``.
    """
    u = (phi - n * alpha) / TWO_PI
    m = math.floor(u + 0.5)
    first = abs(math.sin((phi - n * alpha) / 2)) < eps / 2
    return first and abs(u - m) < eps / 4


@dataclass(frozen=True)
class U1Scan:
    epsilons: tuple[float, ...]
    complexities: tuple[int | None, ...]
    slope: float
    loglog_slope: float
    reference_line: tuple[float, ...]
    K: float
    tau: float
    implied_floor: tuple[int, ...]

    def to_csv_rows(self) -> list[tuple]:
        return list(zip(self.epsilons, self.complexities, self.reference_line))


def u1_scaling_scan(phi, alpha: float, eps_grid, n_max: int, tau: float = 3.0) -> U1Scan:
    """Exact ``C_eps`` on a grid with least-squares slopes.

    ``slope`` fits ``C_eps`` against ``log(1/eps)``; ``loglog_slope`` fits
    ``log C_eps``. ``reference_line`` is ``(1/3) log(1/eps)``, the comparison
    for ``log C_eps`` at algebraic inputs. ``K`` is the largest constant with
    ``|phi/2pi - n alpha/2pi - m| >= K/(|n|+|m|+1)^tau`` over the accepted
    ``(n, m)``, and ``implied_floor`` the least ``|n|`` that this bound
    allows at each ``eps``.
    """
    phi = float(CirclePoint(float(phi)))
    eps_grid = [float(e) for e in eps_grid]
    comps: list[int | None] = []
    gaps = []
    for eps in eps_grid:
        try:
            n = u1_complexity_with_witness(phi, alpha, eps, n_max)
        except NotFound:
            comps.append(None)
            continue
        comps.append(abs(n))
        u = (phi - n * alpha) / TWO_PI
        m = math.floor(u + 0.5)
        gaps.append((abs(u - m), abs(n) + abs(m) + 1))
    pts = [(e, c) for e, c in zip(eps_grid, comps) if c is not None]
    if len(pts) < 3:
        raise InsufficientData(f"only {len(pts)} grid points resolved")
    x = np.log(1.0 / np.array([e for e, _ in pts]))
    c = np.array([c for _, c in pts], dtype=float)
    slope = float(np.polyfit(x, c, 1)[0])
    pos = c > 0
    loglog = float(np.polyfit(x[pos], np.log(c[pos]), 1)[0]) if pos.sum() >= 2 else float("nan")
    K = min(g * h ** tau for g, h in gaps)
    # |m| <= |n| |alpha|/2pi + 2, so |n| + |m| + 1 <= |n| (1 + |alpha|/2pi) + 3
    spread = 1 + abs(alpha) / TWO_PI
    floor = tuple(max(0, math.ceil(((4 * K / e) ** (1 / tau) - 3) / spread)) for e in eps_grid)
    ref = tuple(math.log(1 / e) / 3 for e in eps_grid)
    return U1Scan(tuple(eps_grid), tuple(comps), slope, loglog, ref, float(K), tau, floor)
