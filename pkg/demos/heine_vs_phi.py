"""Heine-type bilinear expansion converging to the fundamental solution."""
from fractions import Fraction

from dunkl_harmonics.fundamental import PhiEvaluator, heine_expansion, phi
from dunkl_harmonics.model import DunklParams, EllipsoidAxes

params = DunklParams(1, (Fraction(2), Fraction(1)))
axes = EllipsoidAxes((-1, 1))
pe = PhiEvaluator(params)
y, z = (0.3, 0.2), (4.0, 3.0)
ref = phi(pe, y, z)
print(f"Phi(y, z) = {ref:.16e}")
for M in range(0, 15, 2):
    v = heine_expansion(pe, axes, y, z, M)
    print(f"M={M:2d}  sum={v:.16e}  rel. error={abs(v - ref) / ref:.2e}")
