"""Two rotations by arccos(1/3) about orthogonal axes generate a free group.

Every reduced word of length l should give a distinct unitary, so the
shells hold 4 * 3**(l-1) elements. We count them numerically and set the
exponential Cayley ball beside a quartic polynomial.
"""

from __future__ import annotations

from fractions import Fraction

from qclab.gatesets import build_su2_gateset
from qclab.words import cayley_vs_polynomial, free_group_check

gates = build_su2_gateset(Fraction(1, 3))
census = free_group_check(gates, 8)
print("shell sizes:", census.shell_counts)
print("expected:   ", census.expected_counts)
print("collisions: ", census.n_collisions)

print("\n r   ball    r^4")
for r, ball, poly in cayley_vs_polynomial(10, 4):
    print(f"{r:2d} {ball:7d} {poly:6d}")
