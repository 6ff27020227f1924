"""Named, reproducible experiments with CSV outputs and a manifest.

Each experiment takes a flat parameter map (defaults below, overridden by a
config file, overridden again by command-line flags) and writes CSV files
whose last line is ``# manifest: <config hash>``. A JSON line per run is
appended to ``manifest.jsonl`` in the output directory with the config hash,
a git-style blob hash of every output, the wall time and the error name.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ConfigError, InsufficientData, NoConvergence, NotFound, QCLabError

__all__ = [
    "EXPERIMENTS",
    "STOCHASTIC",
    "ExperimentConfig",
    "ManifestEntry",
    "config_hash",
    "blob_hash",
    "run",
]


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    params: dict = field(default_factory=dict)
    seed: int | None = None
    output_dir: str = "out"

    def resolved(self) -> dict:
        """Defaults merged with ``params``; unknown keys are a config error."""
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        defaults = EXPERIMENTS[self.experiment][1]
        unknown = sorted(set(self.params) - set(defaults))
        if unknown:
            raise ConfigError(f"unknown parameter(s) for {self.experiment}: {', '.join(unknown)}")
        if self.experiment in STOCHASTIC and self.seed is None:
            raise ConfigError(f"{self.experiment} is stochastic and needs a seed")
        if self.seed is not None and not (isinstance(self.seed, int) and 0 <= self.seed < 2 ** 64):
            raise ConfigError("seed must be a 64-bit unsigned integer")
        return {**defaults, **self.params}


@dataclass(frozen=True)
class ManifestEntry:
    experiment: str
    config_hash: str
    outputs: dict
    wall_time: float
    error: str | None
    exit_code: int

    def to_json(self) -> str:
        return json.dumps({"experiment": self.experiment, "config_hash": self.config_hash,
                           "outputs": self.outputs, "wall_time": round(self.wall_time, 6),
                           "error": self.error}, sort_keys=True)


def config_hash(config: ExperimentConfig) -> str:
    payload = {"experiment": config.experiment, "params": config.resolved(), "seed": config.seed}
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode()).hexdigest()


def blob_hash(data: bytes) -> str:
    """Content hash in git's blob format."""
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


class _Outputs:
    def __init__(self):
        self.files: dict[str, bytes] = {}
        self.attempts = 0
        self.failures = 0

    def csv(self, name: str, header, rows) -> None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])
        self.files[name] = buf.getvalue().encode()

    def json(self, name: str, obj) -> None:
        self.files[name] = (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode()

    def tally(self, ok: bool) -> None:
        self.attempts += 1
        self.failures += not ok


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _grid(spec) -> list[float]:
    if isinstance(spec, dict):
        try:
            return [float(x) for x in np.geomspace(spec["start"], spec["stop"], int(spec["num"]))]
        except KeyError as exc:
            raise ConfigError(f"grid needs start, stop and num (missing {exc})") from None
    return [float(x) for x in spec]


def _rational(x) -> Fraction:
    try:
        return Fraction(str(x))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"cos_pi_alpha {x!r} is not a rational number") from None


def _q(x) -> float:
    if isinstance(x, str) and x.lower() in ("inf", "infinity"):
        return math.inf
    return float(x)


def _solver(p: dict, seed: int):
    from .geodesic import SolverConfig

    try:
        return SolverConfig.from_dict({**p["solver"], "seed": seed})
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


# --- runners -----------------------------------------------------------------

def _flag(p, seed, out: _Outputs):
    from .flag import build_distribution, grow_flag

    flag = grow_flag(build_distribution(int(p["N"]), p["pattern"]))
    out.json("flag.json", flag.summary())
    out.csv("flag_levels.csv", ["level", "m"], enumerate(flag.m, start=1))


def _cayley(p, seed, out):
    from .words import cayley_growth

    rows = cayley_growth(int(p["r_max"]), int(p["generators"]))
    out.csv("cayley.csv", ["r", "count"], [(r, s) for r, s, _ in rows])
    n = int(p["exponent"])
    out.csv("cayley_vs_polynomial.csv", ["r", "ball", f"r_pow_{n}", "ratio"],
            [(r, b, r ** n, s / rows[i - 1][1] if i else None)
             for i, (r, s, b) in enumerate(rows)])


def _free_check(p, seed, out):
    from .gatesets import build_su2_gateset
    from .words import free_group_check

    gs = build_su2_gateset(_rational(p["cos_pi_alpha"]))
    census = free_group_check(gs, int(p["max_cost"]), float(p["tol"]))
    out.csv("free_check.csv", ["l", "count", "expected"],
            [(l, c, e) for l, (c, e) in enumerate(zip(census.shell_counts,
                                                      census.expected_counts), start=1)])
    out.csv("free_check_collisions.csv", ["word_a", "word_b", "distance"],
            [(str(a), str(b), d) for a, b, d in census.collisions])


def _dioph(p, seed, out):
    from .gatesets import build_su2_gateset
    from .words import diophantine_gaps, fit_diophantine_constant

    gs = build_su2_gateset(_rational(p["cos_pi_alpha"]))
    lengths = list(range(1, int(p["l_max"]) + 1))
    gaps = diophantine_gaps(gs, lengths)
    out.csv("dioph.csv", ["l", "min_gap"], zip(lengths, gaps))
    rep = fit_diophantine_constant(lengths, gaps, float(p["slack"]))
    out.csv("dioph_fit.csv", ["l", "min_gap", "fitted_gap", "relative_residual", "floor"],
            [(l, g, g * (1 + r), r, f) for l, g, r, f in
             zip(rep.lengths, rep.min_gaps, rep.residuals, rep.floor(float(p["slack"])))])
    out.csv("dioph_summary.csv", ["D_fit", "intercept", "max_residual", "floor_holds"],
            [(rep.fitted_D, rep.intercept, rep.fit_residual, rep.floor_holds)])


def _complexity(p, seed, out):
    from .gatesets import build_su2_gateset
    from .linalg import haar_su
    from .words import complexity_scaling_scans, diophantine_gaps, fit_diophantine_constant

    gs = build_su2_gateset(_rational(p["cos_pi_alpha"]))
    rng = np.random.default_rng(seed)
    targets = [haar_su(2, rng) for _ in range(int(p["n_targets"]))]
    eps = _grid(p["eps_grid"])
    max_cost = int(p["max_cost"])
    lengths = list(range(1, max_cost + 1))
    rep = fit_diophantine_constant(lengths, diophantine_gaps(gs, lengths))
    scans = complexity_scaling_scans(gs, targets, eps, max_cost, rep, skip_insufficient=True)
    rows, summary = [], []
    for t, scan in enumerate(scans):
        if scan is None:
            out.tally(False)
            summary.append((t, None, None, "InsufficientData"))
            continue
        for e, c, b in scan.to_csv_rows():
            out.tally(c is not None)
            rows.append((t, e, c, b))
        summary.append((t, scan.slope, scan.intercept, None))
    out.csv("complexity.csv", ["target", "epsilon", "complexity", "lower_bound_line"], rows)
    out.csv("complexity_fit.csv", ["target", "slope", "intercept", "error"], summary)


def _u1(p, seed, out):
    from .u1 import u1_scaling_scan

    eps = _grid(p["eps_grid"])
    scan = u1_scaling_scan(float(p["phi"]), float(p["alpha"]), eps, int(p["n_max"]),
                           float(p["tau"]))
    for c in scan.complexities:
        out.tally(c is not None)
    out.csv("u1.csv", ["epsilon", "complexity", "reference_line"], scan.to_csv_rows())
    out.csv("u1_fit.csv", ["epsilon", "implied_floor", "slope", "loglog_slope", "K", "tau"],
            [(e, f, scan.slope, scan.loglog_slope, scan.K, scan.tau)
             for e, f in zip(scan.epsilons, scan.implied_floor)])


def _geodesic(p, seed, out):
    from .flag import build_distribution
    from .geodesic import PenaltyMetric, solve_bvp
    from .linalg import biinvariant_distance, haar_su

    n = int(p["N"])
    if n not in (1, 2):
        raise ConfigError("dense boundary-value solves are limited to N <= 2")
    metric = PenaltyMetric(n, _q(p["q"]), build_distribution(n, p["pattern"]))
    cfg = _solver(p, seed)
    rng = np.random.default_rng(seed)
    d = 2 ** n
    rows = []
    for t in range(int(p["n_targets"])):
        V = haar_su(d, rng)
        U = np.eye(d, dtype=complex)
        lower = biinvariant_distance(U, V)
        try:
            est = solve_bvp(U, V, metric, cfg)
            ok = True
        except NoConvergence as exc:
            est, ok = exc.estimate, False
        out.tally(ok)
        rows.append((t, metric.q, est.value, lower, est.endpoint_error, ok))
    out.csv("geodesic.csv", ["target", "q", "distance", "biinvariant", "endpoint_error",
                             "converged"], rows)


def _holder(p, seed, out):
    from .geodesic import holder_experiment

    res = holder_experiment(p["direction"], _grid(p["deltas"]), _solver(p, seed),
                            tuple(p["easy"]))
    for c in res.distances:
        out.tally(c is not None)
    out.csv("holder.csv", ["q", "delta", "distance", "endpoint_error", "converged"],
            res.to_csv_rows())
    out.csv("holder_fit.csv", ["direction", "degree", "slope", "stderr", "ci_low", "ci_high",
                               "expected"],
            [(res.direction, res.degree, res.slope, res.stderr, *res.ci95,
              res.expected_slope)])


def _cutloc(p, seed, out):
    from .geodesic import cutlocus_experiment

    res = cutlocus_experiment([float(q) for q in p["q_grid"]], p["direction"],
                              _solver(p, seed), float(p["delta_max"]), float(p["factor"]),
                              int(p["bisections"]), tuple(p["easy"]))
    for c in res.crossovers:
        out.tally(c is not None)
    out.csv("cutloc_samples.csv", ["q", "delta", "distance", "endpoint_error", "converged"],
            res.to_csv_rows())
    out.csv("cutloc.csv", ["q", "delta_star", "distance", "horizontal_distance", "slope"],
            [(q, s, c, h, res.slope) for q, s, c, h in
             zip(res.q_values, res.crossovers, res.distances_at_crossover,
                 res.horizontal_at_crossover)])


_SOLVER = {"segments": 16, "starts": 8, "max_iter": 3000, "tol": 1e-6}

EXPERIMENTS = {
    "flag": (_flag, {"N": 1, "pattern": ["Y", "Z"]}),
    "cayley": (_cayley, {"r_max": 10, "generators": 2, "exponent": 4}),
    "free-check": (_free_check, {"cos_pi_alpha": "1/3", "max_cost": 10, "tol": 1e-6}),
    "dioph-scan": (_dioph, {"cos_pi_alpha": "1/3", "l_max": 10, "slack": 10.0}),
    "complexity-scan": (_complexity, {"cos_pi_alpha": "1/3", "max_cost": 12, "n_targets": 3,
                                      "eps_grid": {"start": 0.1, "stop": 0.01, "num": 5}}),
    "u1-scan": (_u1, {"phi": 2 * math.pi / math.sqrt(2), "alpha": math.pi * (math.sqrt(5) - 1),
                      "n_max": 200000, "tau": 3.0,
                      "eps_grid": {"start": 0.1, "stop": 1e-5, "num": 9}}),
    "geodesic": (_geodesic, {"N": 1, "q": 1.0, "pattern": "all-to-all", "n_targets": 5,
                             "solver": _SOLVER}),
    "holder": (_holder, {"direction": "X", "easy": ["Y", "Z"], "solver": _SOLVER,
                         "deltas": {"start": 1e-3, "stop": 1e-1, "num": 7}}),
    "cutloc": (_cutloc, {"q_grid": [1e1, 1e2, 1e3, 1e4], "direction": "X",
                         "easy": ["Y", "Z"], "delta_max": 2.5, "factor": 2.0,
                         "bisections": 6, "solver": {**_SOLVER, "starts": 4}}),
}

STOCHASTIC = frozenset({"complexity-scan", "geodesic", "holder", "cutloc"})


def run(config: ExperimentConfig) -> ManifestEntry:
    """Run one experiment, write its outputs and append to ``manifest.jsonl``.

    Exit codes on the returned entry: 0 ok, 2 config error, 3 when more than
    half of the attempted points ended in NotFound or NoConvergence, or when
    so many were dropped that a fit had too little data; 1 for any other
    library error.
    """
    params = config.resolved()
    chash = config_hash(config)
    runner = EXPERIMENTS[config.experiment][0]
    seed = config.seed if config.seed is not None else 0
    out = _Outputs()
    error, code = None, 0
    start = time.perf_counter()
    try:
        runner(params, seed, out)
    except ConfigError:
        raise
    except (NotFound, NoConvergence, InsufficientData) as exc:
        error, code = type(exc).__name__, 3
    except QCLabError as exc:
        error, code = type(exc).__name__, 1
    wall = time.perf_counter() - start
    if code == 0 and out.attempts and out.failures * 2 > out.attempts:
        error, code = "NotFound/NoConvergence", 3
    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    hashes = {}
    for name, data in out.files.items():
        if name.endswith(".csv"):
            data += f"# manifest: {chash}\n".encode()
        (outdir / name).write_bytes(data)
        hashes[name] = blob_hash(data)
    entry = ManifestEntry(config.experiment, chash, hashes, wall, error, code)
    with open(outdir / "manifest.jsonl", "a") as fh:
        fh.write(entry.to_json() + "\n")
    return entry
