"""Characteristic functions of the three built-in families.

The plain characteristic function F(z) is an analytic function off the
closure of the diagonal sequence whose zeros are exactly the eigenvalues.
For operators with compactness structure a renormalized variant F~(z)
extends it across the diagonal closure.  Both are compared here against
their independent closed forms.
"""

import numpy as np

from jspec import bessel_compact, charfn, linear_free, q_geometric
from jspec.oracles import (ref_bessel_charfn_reg, ref_linear_charfn_reg,
                           ref_qgeo_charfn, ref_qgeo_charfn_reg)
from jspec.regularization import charfn_reg


def show(label, got, ref):
    err = abs(got - ref) / (1.0 + abs(ref))
    print(f"  {label:<34} got {got:+.12f}  rel.err {err:.2e}")


print("plain characteristic function")
sp = q_geometric(0.5, 0.8)
for z in (1.3 + 0.2j, 0.3, -0.7 + 0.4j):
    show(f"geometric, z = {z}", charfn(sp, z).value,
         ref_qgeo_charfn(0.5, 0.8, z))

# for the other two families the plain function is identically 1
for name, sp_ in (("inverse-linear", bessel_compact(0.3, 0.7)),
                  ("linear", linear_free(1.0))):
    show(f"{name}, z = 0.6+0.2j", charfn(sp_, 0.6 + 0.2j).value, 1.0)

print("\nrenormalized characteristic function")
show("linear -> sin(pi z)/pi, z = 1.7+0.4j",
     charfn_reg(linear_free(1.0), 1.7 + 0.4j).value,
     ref_linear_charfn_reg(1.7 + 0.4j))
show("inverse-linear closed form, z = 2",
     charfn_reg(bessel_compact(0.3, 0.7), 2.0).value,
     ref_bessel_charfn_reg(0.3, 2.0))
show("geometric q-Pochhammer product, z = 0.3",
     charfn_reg(q_geometric(0.5, 0.8), 0.3).value,
     ref_qgeo_charfn_reg(0.5, 0.8, 0.3))

print("\nthe renormalized function is defined on the diagonal itself")
cv = charfn(q_geometric(0.5, 0.8), 2.0)  # z = q^{-1} is a diagonal value
print(f"  plain value at z = 2 needs a limit ({cv.note}), "
      f"renormalized needs none:")
show("  F~(2)", charfn_reg(q_geometric(0.5, 0.8), 2.0).value,
     ref_qgeo_charfn_reg(0.5, 0.8, 2.0))

print("\nzeros mark eigenvalues: |F~| on the real axis near 1/(alpha+N)")
sp = bessel_compact(0.3, 0.7)
for z in np.array([1.0 / 1.32, 1.0 / 1.305, 1.0 / 1.3, 1.0 / 1.295]):
    print(f"  z = {z:.6f}   |F~(z)| = {abs(charfn_reg(sp, z).value):.3e}")
