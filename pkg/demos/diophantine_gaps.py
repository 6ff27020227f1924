"""How close do words of a given length come back to the identity?

The minimum gap shrinks roughly like D**-l. The fit is rough because each
point is the minimum over thousands of scattered elements. The residual
column shows that scatter directly.
"""

from __future__ import annotations

from fractions import Fraction

from qclab.gatesets import build_su2_gateset
from qclab.words import diophantine_gaps, fit_diophantine_constant

lengths = list(range(1, 10))
gaps = diophantine_gaps(build_su2_gateset(Fraction(1, 3)), lengths)
fit = fit_diophantine_constant(lengths, gaps)

print(f"fitted D = {fit.fitted_D:.3f}   floor D^-l/10 respected: {fit.floor_holds}")
print(" l   min_gap   residual")
for l, g, r in zip(fit.lengths, fit.min_gaps, fit.residuals):
    print(f"{l:2d}  {g:8.4f}  {r:+7.2f}")
