"""Growth vectors of Pauli flags.

Starting from the easy directions, repeated commutators fill out su(2^N).
The level sizes give the step s and the Hausdorff dimension n_H of the
resulting sub-Riemannian structure.
"""

from __future__ import annotations

from qclab.flag import build_distribution, grow_flag

cases = [(1, ["Y", "Z"]), (2, "all-to-all"), (3, "ring"), (3, "all-to-all")]
for n, pattern in cases:
    flag = grow_flag(build_distribution(n, pattern))
    print(f"N={n} {str(pattern):12s} m={flag.m}  s={flag.step}  n_H={flag.hausdorff_dimension}")
