"""Numerical laboratory for discrete gate complexity, Diophantine structure and
sub-Riemannian complexity distance on SU(2^N).

Submodules load lazily, so ``import qclab`` stays cheap and the command-line
entry point can set thread limits before numpy starts.
"""

from __future__ import annotations

import importlib

__version__ = "0.1.0"

_EXPORTS = {
    "errors": ["QCLabError", "DimensionError", "BranchCut", "InvalidAngle", "DimensionCap",
               "BudgetExceeded", "NotFound", "FitDegenerate", "InsufficientData",
               "NotGenerating", "HorizontalityViolation", "NoConvergence", "BracketError",
               "ConfigError"],
    "linalg": ["hs_norm", "hs_distance", "mat_exp", "principal_log", "su_log",
               "biinvariant_distance", "euler_decompose", "euler_compose",
               "depth_lower_bound", "haar_su"],
    "pauli": ["PauliString", "pauli_basis", "pauli_commutator", "pauli_product"],
    "flag": ["Distribution", "Flag", "build_distribution", "grow_flag", "box_exponent",
             "degree_of_direction"],
    "gatesets": ["GateSet", "build_su2_gateset", "embed_gate", "build_local_gateset"],
    "words": ["Word", "enumerate_group_elements", "gate_complexity", "approximate",
              "min_distance_to_targets", "diophantine_gaps", "fit_diophantine_constant",
              "free_group_check", "cayley_growth", "complexity_scaling_scan"],
    "u1": ["CirclePoint", "continued_fraction", "u1_complexity", "u1_scaling_scan",
           "first_return_oracle"],
    "geodesic": ["PenaltyMetric", "ControlPath", "SolverConfig", "DistanceEstimate",
                 "metric_inner", "path_endpoint", "path_cost", "solve_bvp",
                 "holder_experiment", "cutlocus_experiment"],
    "experiments": ["ExperimentConfig", "run"],
}
_OWNER = {name: mod for mod, names in _EXPORTS.items() for name in names}

__all__ = sorted(_OWNER)


def __getattr__(name):
    mod = _OWNER.get(name)
    if mod is None:
        raise AttributeError(f"module 'qclab' has no attribute {name!r}")
    return getattr(importlib.import_module(f".{mod}", __name__), name)


def __dir__():
    return sorted(set(globals()) | set(__all__))
