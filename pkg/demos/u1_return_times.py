"""The abelian contrast: powers of a single phase rotation.

Reaching e^{i phi} within eps by powers of e^{i alpha} takes about 1/eps
steps, polynomial in 1/eps rather than logarithmic. The brute scan is
checked against an exact first-return oracle.
"""

from __future__ import annotations

import math

import numpy as np

from qclab.u1 import first_return_oracle, u1_scaling_scan

alpha = 2 * math.pi * (math.sqrt(5) - 1) / 2
phi = 1.0
scan = u1_scaling_scan(phi, alpha, np.geomspace(1e-1, 1e-4, 7), 200_000)
for e, c in zip(scan.epsilons, scan.complexities):
    print(f"eps={e:.1e}  C={c}  oracle={first_return_oracle(phi, alpha, e)}")
print(f"log-log slope {scan.loglog_slope:.2f} (about 1 for a badly approximable angle)")
