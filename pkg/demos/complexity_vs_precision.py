"""Word complexity of an algebraic target as the precision tightens.

For a free gate set, reaching precision eps needs a word whose length grows
at least like log(1/eps). We pick an algebraic SU(2) element near a random
point and record the shortest word within each eps.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from qclab.gatesets import algebraic_su2_near, build_su2_gateset
from qclab.linalg import haar_su
from qclab.words import complexity_scaling_scans

rng = np.random.default_rng(7)
quat, target, dist = algebraic_su2_near(haar_su(2, rng), 0.3, limit=1)[0]
print(f"target quaternion {quat}, distance from the random point {dist:.3f}")

eps = np.geomspace(1e-1, 1e-2, 5)
scan = complexity_scaling_scans(build_su2_gateset(Fraction(1, 3)), [target], eps, 12,
                                skip_insufficient=True)[0]
if scan is None:
    print("too few precisions resolved at this word budget")
else:
    for e, c in zip(scan.epsilons, scan.complexities):
        print(f"eps={e:.3g}  C={c}")
    print(f"slope of C against log(1/eps): {scan.slope:.2f}")
