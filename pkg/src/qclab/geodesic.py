"""Complexity distance under the penalty metric on SU(2^N).

Controls are piecewise-constant Hamiltonians ``H(t) = sum_a h_a(t) P_a`` over
the Pauli basis, driving ``d gamma/dt = -i H(t) gamma``. With
``Tr(P_a P_b) = 2^N delta_ab`` the penalty inner product is diagonal in
these coefficients: weight 1 on easy strings and ``q`` on hard ones. With
``q = inf`` hard coefficients are pinned to zero (horizontal curves).

The boundary-value solver minimizes energy at fixed uniform time steps,
enforcing the endpoint with a quadratic penalty whose weight grows tenfold
per stage. Gradients flow through the segment exponentials via the
eigenbasis form of the Frechet derivative of ``exp``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import BracketError, HorizontalityViolation, InsufficientData, NoConvergence
from .flag import Distribution, build_distribution, grow_flag
from .linalg import BranchCut, hs_distance, mat_exp, su_log
from .pauli import PauliString, basis_matrices, pauli_basis

__all__ = [
    "PenaltyMetric",
    "ControlPath",
    "SolverConfig",
    "DistanceEstimate",
    "metric_inner",
    "path_endpoint",
    "path_cost",
    "endpoint_jacobian",
    "penalized_energy",
    "solve_bvp",
    "straight_line_path",
    "holder_experiment",
    "HolderResult",
    "cutlocus_experiment",
    "CutLocusResult",
    "horizontal_distance_x",
    "penalty_distance_x",
]


@dataclass(frozen=True)
class PenaltyMetric:
    """``<H1, H2> = [Tr(H1 P H2) + q Tr(H1 Q H2)] / 2^N`` with ``P`` projecting on ``easy``."""

    n_qubits: int
    q: float
    easy: Distribution

    def __post_init__(self):
        if not self.q >= 1:
            raise ValueError("penalty factor q must be >= 1")
        if self.easy.n_qubits != self.n_qubits:
            raise ValueError("easy set acts on the wrong number of qubits")

    @classmethod
    def nielsen(cls, n_qubits: int, q: float, pattern="all-to-all") -> "PenaltyMetric":
        return cls(n_qubits, float(q), build_distribution(n_qubits, pattern))

    @property
    def horizontal(self) -> bool:
        return math.isinf(self.q)

    @property
    def basis(self) -> list[PauliString]:
        return pauli_basis(self.n_qubits)

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    @property
    def easy_mask(self) -> np.ndarray:
        return np.array([p in self.easy.strings for p in self.basis])

    @property
    def weights(self) -> np.ndarray:
        return np.where(self.easy_mask, 1.0, self.q)

    def free_indices(self) -> np.ndarray:
        """Basis indices the solver may move: all of them, or the easy ones when q is infinite."""
        if self.horizontal:
            return np.flatnonzero(self.easy_mask)
        return np.arange(len(self.basis))


def _check_horizontal(h: np.ndarray, metric: PenaltyMetric, tol: float = 0.0) -> None:
    if metric.horizontal and np.any(np.abs(h[..., ~metric.easy_mask]) > tol):
        raise HorizontalityViolation("hard-direction coefficients must vanish when q is infinite")


def metric_inner(h1, h2, metric: PenaltyMetric) -> float:
    """Penalty inner product of two coefficient vectors over ``pauli_basis(N)``."""
    h1 = np.asarray(h1, dtype=float)
    h2 = np.asarray(h2, dtype=float)
    if h1.shape != (len(metric.basis),) or h2.shape != h1.shape:
        raise ValueError("coefficient vectors must match the Pauli basis")
    if metric.horizontal:
        _check_horizontal(h1, metric)
        _check_horizontal(h2, metric)
        m = metric.easy_mask
        return float(np.dot(h1[m], h2[m]))
    return float(np.sum(metric.weights * h1 * h2))


@dataclass(frozen=True)
class ControlPath:
    """Piecewise-constant control: row ``k`` of ``coefficients`` acts for ``durations[k]``.

    A path with no segments is allowed and stays at its start.
    """

    coefficients: np.ndarray = field(repr=False)
    durations: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=float)
        t = np.array(self.durations, dtype=float)
        if c.ndim != 2 or t.shape != (c.shape[0],):
            raise ValueError("need an (m, n_basis) coefficient array and m durations")
        if np.any(t <= 0) or (len(t) and abs(t.sum() - 1.0) > 1e-12):
            raise ValueError("durations must be positive and sum to 1")
        n = round(math.log(c.shape[1] + 1, 4))
        if 4 ** n - 1 != c.shape[1]:
            raise ValueError("coefficient width is not 4^N - 1")
        c.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "durations", t)

    @classmethod
    def uniform(cls, coefficients) -> "ControlPath":
        c = np.asarray(coefficients, dtype=float)
        return cls(c, np.full(c.shape[0], 1.0 / c.shape[0]))

    @classmethod
    def zero(cls, n_qubits: int, segments: int = 1) -> "ControlPath":
        return cls.uniform(np.zeros((segments, 4 ** n_qubits - 1)))

    @property
    def n_qubits(self) -> int:
        return round(math.log(self.coefficients.shape[1] + 1, 4))

    @property
    def segments(self) -> int:
        return self.coefficients.shape[0]

    def hamiltonians(self) -> np.ndarray:
        return np.einsum("ka,aij->kij", self.coefficients, basis_matrices(self.n_qubits))

    def split(self, k: int, fraction: float = 0.5) -> "ControlPath":
        """Cut segment ``k`` in two pieces with the same Hamiltonian."""
        c = np.insert(self.coefficients, k, self.coefficients[k], axis=0)
        t = list(self.durations)
        t[k:k + 1] = [t[k] * fraction, t[k] * (1 - fraction)]
        return ControlPath(c, np.array(t))

    def refine(self) -> "ControlPath":
        """Every segment split in half; the control function is unchanged."""
        return ControlPath(np.repeat(self.coefficients, 2, axis=0),
                           np.repeat(self.durations / 2, 2))


def _segment_exps(H: np.ndarray, dt: np.ndarray):
    w, Q = np.linalg.eigh(H)
    phases = np.exp(-1j * w * dt[:, None])
    E = np.einsum("kij,kj,klj->kil", Q, phases, Q.conj())
    return E, w, Q, phases


def path_endpoint(path: ControlPath, start) -> np.ndarray:
    """``exp(-i H_m dt_m) ... exp(-i H_1 dt_1) start``."""
    start = np.asarray(start, dtype=complex)
    if path.segments == 0:
        return start.copy()
    E, *_ = _segment_exps(path.hamiltonians(), path.durations)
    out = start
    for Ek in E:
        out = Ek @ out
    return out


def path_cost(path: ControlPath, metric: PenaltyMetric) -> tuple[float, float]:
    """``(length, energy) = (sum dt <H,H>^(1/2), sum dt <H,H>)``."""
    h = path.coefficients
    if h.shape[1] != len(metric.basis):
        raise ValueError("path and metric act on different numbers of qubits")
    if metric.horizontal:
        _check_horizontal(h, metric)
        sq = np.sum(h[:, metric.easy_mask] ** 2, axis=1)
    else:
        sq = np.sum(metric.weights * h ** 2, axis=1)
    dt = path.durations
    return float(np.sum(dt * np.sqrt(sq))), float(np.sum(dt * sq))


def _dexp_kernel(w: np.ndarray, phases: np.ndarray, dt: np.ndarray) -> np.ndarray:
    """Divided differences ``Phi_ij = (e^{a_i} - e^{a_j}) / (a_i - a_j)`` with ``a = -i w dt``.

    Written as ``e^{a_j} e^{i theta/2} sinc(theta/2pi)``, ``theta = -(w_i - w_j) dt``,
    which stays accurate for (nearly) equal eigenvalues.
    """
    theta = -(w[:, :, None] - w[:, None, :]) * dt[:, None, None]
    return phases[:, None, :] * np.exp(0.5j * theta) * np.sinc(theta / (2 * np.pi))


def endpoint_jacobian(path: ControlPath, start) -> np.ndarray:
    """``d endpoint / d coefficient[k, a]`` as an array of shape ``(m, n_basis, d, d)``."""
    start = np.asarray(start, dtype=complex)
    P = basis_matrices(path.n_qubits)
    dt = path.durations
    E, w, Q, phases = _segment_exps(path.hamiltonians(), dt)
    m, d = len(E), start.shape[0]
    right = [start]
    for Ek in E:
        right.append(Ek @ right[-1])
    left = [np.eye(d, dtype=complex)] * m
    for k in range(m - 2, -1, -1):
        left[k] = left[k + 1] @ E[k + 1]
    Phi = _dexp_kernel(w, phases, dt)
    out = np.empty((m, len(P), d, d), dtype=complex)
    for k in range(m):
        Bt = np.einsum("ji,ajl,lk->aik", Q[k].conj(), -1j * dt[k] * P, Q[k])
        dE = np.einsum("ij,ajl,kl->aik", Q[k], Phi[k] * Bt, Q[k].conj())
        out[k] = left[k] @ dE @ right[k]
    return out


class _Problem:
    """Penalized energy over the free coefficients, in weight-scaled variables ``z = sqrt(w) h``."""

    def __init__(self, metric: PenaltyMetric, U, V, segments: int):
        self.metric = metric
        self.U = np.asarray(U, dtype=complex)
        self.V = np.asarray(V, dtype=complex)
        self.m = segments
        self.free = metric.free_indices()
        self.n_basis = len(metric.basis)
        self.scale = 1.0 / np.sqrt(metric.weights[self.free])
        self.P = basis_matrices(metric.n_qubits)[self.free]
        self.dt = np.full(segments, 1.0 / segments)
        self.mu = 1.0

    def coefficients(self, z: np.ndarray) -> np.ndarray:
        h = np.zeros((self.m, self.n_basis))
        h[:, self.free] = z.reshape(self.m, -1) * self.scale
        return h

    def path(self, z: np.ndarray) -> ControlPath:
        return ControlPath.uniform(self.coefficients(z))

    def to_z(self, h: np.ndarray) -> np.ndarray:
        return (np.asarray(h)[:, self.free] / self.scale).ravel()

    def endpoint(self, z: np.ndarray) -> np.ndarray:
        return path_endpoint(self.path(z), self.U)

    def __call__(self, z: np.ndarray) -> tuple[float, np.ndarray]:
        zz = z.reshape(self.m, -1)
        hf = zz * self.scale
        dt = self.dt
        H = np.einsum("ka,aij->kij", hf, self.P)
        E, w, Q, phases = _segment_exps(H, dt)
        right = [self.U]
        for Ek in E:
            right.append(Ek @ right[-1])
        gamma = right[-1]
        diff = gamma - self.V
        pen = float(np.sum(diff.real ** 2 + diff.imag ** 2))
        G = diff.conj().T
        d = self.U.shape[0]
        M = np.empty((self.m, d, d), dtype=complex)
        L = np.eye(d, dtype=complex)
        for k in range(self.m - 1, -1, -1):
            M[k] = right[k] @ G @ L
            L = L @ E[k]
        Phi = _dexp_kernel(w, phases, dt)
        Mt = np.einsum("kji,kjl,klm->kim", Q.conj(), M, Q)
        K = np.einsum("kij,kjl,kml->kim", Q, Mt * np.transpose(Phi, (0, 2, 1)), Q.conj())
        tr = np.einsum("kij,aji->ka", K, self.P)
        g_pen = 2.0 * self.mu * dt[:, None] * tr.imag * self.scale
        energy = float(np.sum(dt[:, None] * zz ** 2))
        g_energy = 2.0 * dt[:, None] * zz
        return energy + self.mu * pen, (g_energy + g_pen).ravel()


def penalized_energy(z, metric: PenaltyMetric, U, V, segments: int, mu: float = 1.0):
    """Objective ``energy + mu ||endpoint - V||^2`` and its gradient in scaled variables.

    ``z`` holds ``sqrt(weight) * h`` for the free coefficients, segment-major.
    """
    prob = _Problem(metric, U, V, segments)
    prob.mu = mu
    return prob(np.asarray(z, dtype=float))


@dataclass(frozen=True)
class SolverConfig:
    segments: int = 16
    starts: int = 8
    max_iter: int = 3000
    tol: float = 1e-6
    seed: int = 0
    penalty_start: float | None = None
    penalty_growth: float = 10.0
    max_stages: int = 14
    polish_stages: int = 1
    init_scale: float = 1.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SolverConfig":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in data.items() if k in known})


@dataclass(frozen=True)
class DistanceEstimate:
    value: float
    endpoint_error: float
    multistart_spread: float
    path: ControlPath = field(repr=False)
    converged: bool = True
    n_converged: int = 0
    energy: float = float("nan")
    start_values: tuple[float, ...] = ()


def straight_line_path(U, V, segments: int = 1) -> ControlPath:
    """Constant control ``H = -log(V U^dagger)`` (least-norm traceless branch)."""
    U = np.asarray(U, dtype=complex)
    V = np.asarray(V, dtype=complex)
    n = round(math.log2(U.shape[0]))
    Hp, _ = su_log(V @ U.conj().T)
    P = basis_matrices(n)
    h = -np.real(np.einsum("ij,aji->a", Hp, P)) / U.shape[0]
    return ControlPath.uniform(np.tile(h, (segments, 1)))


def _initial_points(prob: _Problem, config: SolverConfig, rng) -> list[np.ndarray]:
    pts = []
    try:
        line = straight_line_path(prob.U, prob.V, prob.m).coefficients
        pts.append(prob.to_z(line))
    except BranchCut:
        pass
    n_free = prob.m * len(prob.free)
    base = np.linalg.norm(pts[0]) / math.sqrt(prob.m) if pts else 1.0
    sigma = config.init_scale * max(base, 1.0) / math.sqrt(len(prob.free))
    for _ in range(config.starts):
        pts.append(rng.normal(0.0, sigma, n_free))
    return pts


def _initial_penalty(prob: _Problem, z0: np.ndarray, gap: float, config: SolverConfig) -> float:
    if config.penalty_start is not None:
        return config.penalty_start
    # large enough that the start is pulled onto the endpoint before its energy
    # collapses, so each start keeps its own homotopy class
    energy = float(np.sum(z0 ** 2)) / prob.m
    miss = hs_distance(prob.endpoint(z0), prob.V) ** 2
    return min(max(1.0, 10.0 * energy / max(miss, 1e-3)), 1e4) / gap ** 2


def _run_start(prob: _Problem, z0: np.ndarray, config: SolverConfig, mu0: float):
    z = z0
    mu = mu0
    polish = config.polish_stages
    err = hs_distance(prob.endpoint(z), prob.V)
    for _ in range(config.max_stages):
        prob.mu = mu
        res = minimize(prob, z, jac=True, method="L-BFGS-B",
                       options={"maxiter": config.max_iter, "maxcor": 30,
                                "ftol": 1e-15, "gtol": 1e-12})
        z = res.x
        err = hs_distance(prob.endpoint(z), prob.V)
        mu *= config.penalty_growth
        if err < config.tol:
            polish -= 1
            if polish < 0:
                break
    return z, err


def solve_bvp(U, V, metric: PenaltyMetric, config: SolverConfig = SolverConfig()) -> DistanceEstimate:
    """Least-length control from ``U`` to ``V``; the value is the length of the best path found.

    Runs the straight-line start plus ``config.starts`` Gaussian starts drawn
    from ``numpy.random.default_rng(config.seed)``. Raises
    :class:`NoConvergence` (carrying the best attempt) when no start ends
    within ``config.tol`` of ``V``.
    """
    U = np.asarray(U, dtype=complex)
    V = np.asarray(V, dtype=complex)
    if U.shape != V.shape or U.shape[0] != metric.dim:
        raise ValueError("U, V and the metric disagree on dimension")
    prob = _Problem(metric, U, V, config.segments)
    gap = hs_distance(U, V)
    if gap < config.tol:
        path = ControlPath.zero(metric.n_qubits, config.segments)
        return DistanceEstimate(0.0, gap, 0.0, path, True, 1, 0.0, (0.0,))
    rng = np.random.default_rng(config.seed)
    # penalty starts at the scale where staying put costs about one unit
    results = []
    for z0 in _initial_points(prob, config, rng):
        z, err = _run_start(prob, z0, config, _initial_penalty(prob, z0, gap, config))
        path = prob.path(z)
        length, energy = path_cost(path, metric)
        results.append((length, err, energy, path))
    ok = [r for r in results if r[1] < config.tol]
    if not ok:
        best = min(results, key=lambda r: r[1])
        est = DistanceEstimate(best[0], best[1], float("nan"), best[3], False, 0, best[2],
                               tuple(r[0] for r in results))
        raise NoConvergence(f"no start reached the endpoint within {config.tol}", est)
    lengths = [r[0] for r in ok]
    best = min(ok, key=lambda r: r[0])
    return DistanceEstimate(best[0], best[1], max(lengths) - min(lengths), best[3], True,
                            len(ok), best[2], tuple(lengths))


def horizontal_distance_x(delta: float) -> float:
    """Closed form of the {Y, Z} single-qubit distance from 1 to ``exp(-i delta X)``, 0 < delta <= pi.

    The extremals ``exp(i kappa X) exp(-i(a Y + kappa X))`` reach the X axis
    when ``a^2 + kappa^2 = pi^2``; matching the angle gives
    ``kappa = pi - delta`` and length ``|a| = sqrt(2 pi delta - delta^2)``.
    """
    return math.sqrt(2 * math.pi * delta - delta ** 2)


def penalty_distance_x(delta: float, q: float) -> float:
    """Closed form for weight ``q`` on X and 1 on Y, Z, target ``exp(-i delta X)``, 0 <= delta <= pi.

    The direct path costs ``sqrt(q) delta`` and is minimal up to ``delta = pi/q``;
    beyond it the rotating extremal costs ``sqrt(pi^2 - (pi - delta)^2 q/(q-1))``.
    """
    if q == 1 or delta <= math.pi / q:
        return math.sqrt(q) * delta
    return math.sqrt(math.pi ** 2 - (math.pi - delta) ** 2 * q / (q - 1))


def _single_qubit_metric(q: float, easy=("Y", "Z")) -> PenaltyMetric:
    return PenaltyMetric(1, float(q), build_distribution(1, list(easy)))


@dataclass(frozen=True)
class HolderResult:
    direction: str
    degree: int
    deltas: tuple[float, ...]
    distances: tuple[float | None, ...]
    endpoint_errors: tuple[float | None, ...]
    slope: float
    intercept: float
    stderr: float
    ci95: tuple[float, float]

    @property
    def expected_slope(self) -> float:
        return 1.0 / self.degree

    def to_csv_rows(self) -> list[tuple]:
        return [(math.inf, d, c, e, c is not None)
                for d, c, e in zip(self.deltas, self.distances, self.endpoint_errors)]


def _loglog_fit(x, y, min_points: int):
    from scipy import stats

    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < min_points:
        raise InsufficientData(f"only {len(x)} points survived")
    fit = stats.linregress(np.log(x), np.log(y))
    t = stats.t.ppf(0.975, len(x) - 2)
    return fit.slope, fit.intercept, fit.stderr, (fit.slope - t * fit.stderr,
                                                  fit.slope + t * fit.stderr)


def holder_experiment(direction: str = "X", deltas=None, config: SolverConfig = SolverConfig(),
                      easy=("Y", "Z"), n_qubits: int = 1) -> HolderResult:
    """Horizontal distance ``C(1, exp(-i delta P))`` over ``deltas`` and its log-log slope."""
    if deltas is None:
        deltas = np.geomspace(1e-3, 1e-1, 7)
    dist = build_distribution(n_qubits, list(easy))
    flag = grow_flag(dist)
    p = PauliString(direction)
    degree = flag.degrees[p]
    metric = PenaltyMetric(n_qubits, math.inf, dist)
    d = 2 ** n_qubits
    U = np.eye(d, dtype=complex)
    values, errors = [], []
    for delta in deltas:
        V = mat_exp(p.matrix(), delta)
        try:
            est = solve_bvp(U, V, metric, config)
        except NoConvergence:
            values.append(None)
            errors.append(None)
            continue
        values.append(est.value)
        errors.append(est.endpoint_error)
    keep = [(x, y) for x, y in zip(deltas, values) if y is not None]
    slope, intercept, stderr, ci = _loglog_fit([k[0] for k in keep], [k[1] for k in keep], 4)
    return HolderResult(direction, degree, tuple(float(x) for x in deltas), tuple(values),
                        tuple(errors), float(slope), float(intercept), float(stderr),
                        (float(ci[0]), float(ci[1])))


@dataclass(frozen=True)
class CutLocusResult:
    direction: str
    q_values: tuple[float, ...]
    crossovers: tuple[float | None, ...]
    distances_at_crossover: tuple[float | None, ...]
    horizontal_at_crossover: tuple[float | None, ...]
    slope: float
    intercept: float
    samples: tuple[tuple, ...] = field(repr=False, default=())

    def to_csv_rows(self) -> list[tuple]:
        return [tuple(s) for s in self.samples]


def cutlocus_experiment(q_grid=(1e1, 1e2, 1e3, 1e4), direction: str = "X",
                        config: SolverConfig = SolverConfig(), delta_max: float = 2.5,
                        factor: float = 2.0, bisections: int = 6,
                        easy=("Y", "Z")) -> CutLocusResult:
    """Crossover ``delta*(q)`` where ``C_q(1, exp(-i delta P))`` falls to ``sqrt(q) delta / factor``.

    For each ``q`` the scan halves ``delta`` from ``delta_max`` until the
    ratio to the direct-path cost is at least ``1/factor``, then bisects the
    bracket in ``log delta``. Unbracketed or unconverged ``q`` are dropped
    from the fit of ``log delta*`` against ``log q``.
    """
    p = PauliString(direction)
    U = np.eye(2, dtype=complex)
    samples = []

    def ratio(q, delta):
        V = mat_exp(p.matrix(), delta)
        est = solve_bvp(U, V, _single_qubit_metric(q, easy), config)
        r = est.value / (math.sqrt(q) * delta)
        samples.append((q, delta, est.value, est.endpoint_error, True))
        return r, est.value

    crossings, at_cross, horiz = [], [], []
    for q in q_grid:
        try:
            hi = delta_max
            r_hi, _ = ratio(q, hi)
            if r_hi >= 1 / factor:
                raise BracketError("no crossover below delta_max")
            lo = hi / 2
            r_lo, _ = ratio(q, lo)
            while r_lo < 1 / factor:
                hi, lo = lo, lo / 2
                if lo < 1e-8:
                    raise BracketError("crossover not bracketed")
                r_lo, _ = ratio(q, lo)
            for _ in range(bisections):
                mid = math.sqrt(lo * hi)
                r_mid, _ = ratio(q, mid)
                if r_mid >= 1 / factor:
                    lo = mid
                else:
                    hi = mid
            star = math.sqrt(lo * hi)
            _, c_star = ratio(q, star)
            hz = solve_bvp(U, mat_exp(p.matrix(), star), _single_qubit_metric(math.inf, easy),
                           config).value
        except (BracketError, NoConvergence):
            crossings.append(None)
            at_cross.append(None)
            horiz.append(None)
            continue
        crossings.append(star)
        at_cross.append(c_star)
        horiz.append(hz)
    keep = [(q, s) for q, s in zip(q_grid, crossings) if s is not None]
    if len(keep) < 2:
        raise InsufficientData("fewer than two crossovers bracketed")
    slope, intercept = np.polyfit(np.log([k[0] for k in keep]), np.log([k[1] for k in keep]), 1)
    return CutLocusResult(direction, tuple(float(q) for q in q_grid), tuple(crossings),
                          tuple(at_cross), tuple(horiz), float(slope), float(intercept),
                          tuple(samples))
