"""Resolvent (Green function) entries.

G_{ij}(z) = <e_i, (J - z)^{-1} e_j> is built from the two decaying
solutions divided by the characteristic function.  It is symmetric,
satisfies the defining identity row by row, and for the inverse-linear
family has a closed form in Bessel functions.
"""

from jspec import bessel_compact, green
from jspec.oracles import ref_bessel_green

alpha, beta = 0.3, 0.7
sp = bessel_compact(alpha, beta)
z = 0.5 + 0.5j

print(f"inverse-linear family at z = {z}\n")

print("closed-form comparison:")
for i, j in ((0, 0), (2, -1), (-3, 1), (4, 4)):
    got = green(sp, z, i, j)
    ref = ref_bessel_green(alpha, beta, z, i, j)
    print(f"  G_{{{i:+d},{j:+d}}} = {got:+.12f}   rel.err "
          f"{abs(got - ref) / abs(ref):.2e}")

print("\ndefining identity (J - z) G e_0 = e_0:")
col = {j: green(sp, z, j, 0) for j in range(-3, 4)}
for i in range(-2, 3):
    lhs = (sp.w(i - 1) * col[i - 1] + (sp.lam(i) - z) * col[i]
           + sp.w(i) * col[i + 1])
    target = 1.0 if i == 0 else 0.0
    print(f"  row {i:+d}: residue {abs(lhs - target):.2e}")

print("\nsymmetry:")
print(f"  |G_21 - G_12| = {abs(green(sp, z, 2, 1) - green(sp, z, 1, 2)):.2e}")
