"""Eigenvectors and the squared-sum identity.

At an eigenvalue the two decaying solutions are proportional, so the
eigenvector can be assembled from both one-sided sweeps.  Its entries for
the inverse-linear family have a Bessel-function closed form, and the sum
of squared entries equals A(z) F~'(z).
"""

import numpy as np

from jspec import bessel_compact, eigenvector_values, eigvec_sum_identity
from jspec.oracles import ref_bessel_eigvec

alpha, beta, N = 0.3, 0.7, 1
sp = bessel_compact(alpha, beta)
z = 1.0 / (alpha + N)

print(f"inverse-linear family, eigenvalue z = 1/(alpha+{N}) = {z:.9f}\n")

v = eigenvector_values(sp, z, -5, 10, split=N)
ref = np.array([ref_bessel_eigvec(alpha, beta, N, n) for n in range(-5, 11)])
const = v[np.argmax(np.abs(ref))] / ref[np.argmax(np.abs(ref))]

print("  n    computed          sqrt(alpha+n) J_{n-N}      ratio")
for i, n in enumerate(range(-5, 11)):
    r = v[i] / (const * ref[i]) if ref[i] != 0 else float("nan")
    print(f"  {n:+3d}  {v[i].real:+.9e}   {(const * ref[i]).real:+.9e}"
          f"   {r.real:.12f}")

rep = eigvec_sum_identity(sp, z, n_probe=N)
print(f"\nsum rule  sum f_n^2 = A F~':")
print(f"  lhs = {rep.lhs:+.12e}")
print(f"  rhs = {rep.rhs:+.12e}")
print(f"  residual {rep.residual:.2e} using {rep.n_used} entries")
