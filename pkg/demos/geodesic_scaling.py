"""Sub-Riemannian distances on one qubit with easy directions Y and Z.

Moving by delta along the hard X direction costs about sqrt(2 pi delta),
so the Hoelder exponent is 1/2. Along Z it is linear. With a finite
penalty q on X, the straight route wins for small delta and the commutator
route wins beyond a crossover that shrinks like 1/q.
"""

from __future__ import annotations

import numpy as np

from qclab.geodesic import (
    SolverConfig,
    cutlocus_experiment,
    holder_experiment,
    horizontal_distance_x,
)

cfg = SolverConfig(starts=2, seed=1)
deltas = np.geomspace(1e-3, 1e-1, 5)

hard = holder_experiment("X", deltas, cfg)
print("X direction")
for d, c in zip(hard.deltas, hard.distances):
    print(f"  delta={d:.1e}  solver={c:.5f}  closed form={horizontal_distance_x(d):.5f}")
print(f"  slope {hard.slope:.3f}, 95% CI {hard.ci95[0]:.3f}..{hard.ci95[1]:.3f}")

easy = holder_experiment("Z", deltas, cfg)
print(f"Z direction slope {easy.slope:.3f}")

cut = cutlocus_experiment([10.0, 100.0, 1000.0], "X", cfg)
for q, d in zip(cut.q_values, cut.crossovers):
    print(f"q={q:g}: crossover delta* ~ {d:.4g}")
print(f"log delta* against log q: slope {cut.slope:.2f}")
