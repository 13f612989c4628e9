"""Locating point spectra in a rectangle.

The search subdivides the region, counts zeros with the argument principle,
polishes each with Newton iterations, and certifies multiplicity on a small
circle.  Accumulation points of the diagonal sequence are excluded and
reported as unresolved instead of guessed.
"""

import json

from jspec import Box, q_geometric, spectrum

sp = q_geometric(0.5, 0.8)
print("geometric family, q = 0.5, beta = 0.8")
print("expected eigenvalues: q^k and -beta^2 q^k chains\n")

report = spectrum(sp, Box(-0.7, 2.1, -0.1, 0.1), tol=1e-10,
                  exclusion_radius=0.07)
for p in report.eigenpoints:
    print(f"  z = {p.z.real:+.12f} {p.z.imag:+.2e}i   "
          f"mult {p.multiplicity}   method {p.method}")
print(f"\n  excluded zones: {len(report.excluded_zones)} "
      f"(around the origin, where eigenvalues accumulate)")
for u in report.unknown_points:
    print(f"  unresolved: {u['note']}")

print("\nfull JSON report (same shape as the CLI output):")
print(json.dumps(report.to_json(), indent=2, sort_keys=True)[:400] + " ...")
