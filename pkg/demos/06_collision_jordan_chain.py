"""A double eigenvalue and its Jordan chain.

For the geometric family with q = -0.5 and beta^2 = 0.5, the two zero
chains of the characteristic function collide: z = q^2 = 0.25 is a zero of
order two.  The multiplicity certifier reports nu_a = 2, and the order-1
jet of the decaying solution provides the generalized eigenvector, checked
through (J - z0) f' = f on the window.
"""

import math

from jspec import chain_residuals, generalized_eigvecs, multiplicity, q_geometric

q, beta = -0.5, math.sqrt(0.5)
sp = q_geometric(q, beta)
z0 = 0.25

print(f"geometric family, q = {q}, beta^2 = {beta**2}")
print(f"collision point z0 = q^2 = {z0}\n")

rep = multiplicity(sp, z0)
print(f"certified algebraic multiplicity: {rep['nu_a']}")
print("derivative profile |F~^(k)(z0)|:")
for k, d in enumerate(rep["derivative_profile"]):
    print(f"  k = {k}: {d:.6e}")

slices = generalized_eigvecs(sp, z0, rep["nu_a"], (-6, 14))
res = chain_residuals(sp, z0, slices)
print(f"\nJordan chain of length {len(slices)};")
print(f"relative residual of (J - z0) f' = f on the window: {res[0]:.2e}")

print("\nleading entries (eigenvector f, generalized vector f'):")
for n in range(-2, 5):
    f = slices[0].value(n)
    fp = slices[1].value(n)
    print(f"  n = {n:+d}:  f = {f:+.6e}   f' = {fp:+.6e}")
