"""Sphero-conal harmonics for k = 2: polynomials, norms and orthogonality."""
from fractions import Fraction

import numpy as np

from dunkl_harmonics.algebra import dunkl_laplacian
from dunkl_harmonics.harmonics import e_norm_squared, harmonic_evaluator, spheroconal_G_poly
from dunkl_harmonics.integrals import sphere_integrate_poly
from dunkl_harmonics.model import DunklParams, EllipsoidAxes, indices_of_degree

params = DunklParams(2, (Fraction(1, 2), Fraction(1), Fraction(3, 2)))
axes = EllipsoidAxes((0, 1, 3))
fp = params.as_float()
polys = []
for idx in indices_of_degree(2, 2):
    ev = harmonic_evaluator(params, axes, idx)
    G = spheroconal_G_poly(ev)
    polys.append(G)
    lap = dunkl_laplacian(G, fp.alpha)
    res = max((abs(float(c)) for c in lap.terms.values()), default=0.0)
    print(f"{idx}: e^2 = {e_norm_squared(ev):.10f}, |Delta_h G| = {res:.1e}")
    print("   G =", " + ".join(f"{float(c):.6g}*x^{q}" for q, c in G.items()))
gram = np.array([[float(sphere_integrate_poly(fp, a.to_float() * b.to_float())) for b in polys] for a in polys])
print("Gram matrix of the degree-2 harmonics:")
print(np.array2string(gram, precision=3, suppress_small=True))
