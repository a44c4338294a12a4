"""Planar Niven series against the Jacobi closed form.

Prints b_n Q_n(t_0) P_n(t_1) next to the partial sums of the operator series
for a few points, together with the number of terms and the envelope ratio.
"""
import math
from fractions import Fraction

from dunkl_harmonics.niven import planar_lhs, planar_series
from dunkl_harmonics.orthopoly import JacobiParams

jp = JacobiParams(Fraction(1, 2), Fraction(3, 2))
print(f"{'n':>2} {'x':>22} {'closed form':>22} {'series':>22} {'terms':>5} {'ratio':>6}")
for n in range(4):
    ns = planar_series(n, jp)
    for r2, th in [(4.0, 0.7), (9.0, 1.2), (25.0, 0.2)]:
        x = (math.sqrt(r2) * math.cos(th), math.sqrt(r2) * math.sin(th))
        res = ns.evaluate(x)
        print(f"{n:>2} ({x[0]:9.5f},{x[1]:9.5f}) {planar_lhs(n, jp, x):22.15e} "
              f"{res.value:22.15e} {res.terms:>5} {res.ratio:6.3f}")
