"""End-to-end verification checks for the three built-in operator families.

Each check function returns (measured, bound); a check passes when
measured <= bound.  run_checks prints one line per check:

    CHECK <id> <PASS|FAIL> measured=<x> bound=<y>

and returns True iff everything passed.  Setting JSPEC_BREAK=1 tightens one
bound far beyond reach, demonstrating that the harness detects regressions.
The same functions back the acceptance test suite.
"""

from __future__ import annotations

import math
import os
import sys

import numpy as np

from . import oracles, regularization, spectra
from .charfn import (charfn, eigenvector_values, eigvec_sum_identity, green,
                     solution_f, wronskian)
from .ffunc import f_eval, f_eval_bruteforce
from .operators import bessel_compact, custom_operator, linear_free, q_geometric
from .spectra import Box


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def _match_targets(points, targets):
    """Worst distance from each target to its nearest located point; inf on
    a count mismatch."""
    if len(points) != len(targets):
        return math.inf
    return max(min(abs(p - t) for p in points) for t in targets)


def _ratio_match(values, reference):
    """Best-scaling relative sup distance between two vectors."""
    values = np.asarray(values)
    reference = np.asarray(reference)
    k = int(np.argmax(np.abs(reference)))
    c = values[k] / reference[k]
    return float(np.max(np.abs(values - c * reference)) /
                 np.max(np.abs(values)))


# ---------------------------------------------------------------------------
# 1. linear family (free Jacobi operator)
# ---------------------------------------------------------------------------

def check_linear_spectrum():
    sp = linear_free(1.0)
    rep = spectra.spectrum(sp, Box(-3.5, 3.5, -1.0, 1.0), tol=1e-10)
    if any(p.multiplicity != 1 for p in rep.eigenpoints):
        return math.inf, 1e-8
    pts = [p.z for p in rep.eigenpoints]
    return _match_targets(pts, [complex(k) for k in range(-3, 4)]), 1e-8


def check_linear_charfn():
    sp = linear_free(1.0)
    rng = np.random.default_rng(11)
    zs = rng.uniform(-3, 3, 25) + 1j * rng.uniform(0.3, 1.0, 25)
    coeffs, _, _ = regularization.charfn_reg_batch(sp, zs, tol=1e-12)
    worst = max(_rel(v, oracles.ref_linear_charfn_reg(z))
                for v, z in zip(coeffs[:, 0], zs))
    return worst, 1e-9


# ---------------------------------------------------------------------------
# 2. inverse-linear diagonal (compact) family
# ---------------------------------------------------------------------------

_ALPHA, _BETA = 0.3, 0.7


def check_bessel_plain():
    sp = bessel_compact(_ALPHA, _BETA)
    rng = np.random.default_rng(7)
    zs = rng.uniform(-3, 3, 25) + 1j * rng.uniform(0.4, 1.2, 25)
    worst = max(abs(charfn(sp, z, tol=1e-12).value - 1.0) for z in zs)
    return worst, 1e-10


def check_bessel_charfn():
    sp = bessel_compact(_ALPHA, _BETA)
    rng = np.random.default_rng(8)
    zs = rng.uniform(-3, 3, 25) + 1j * rng.uniform(0.4, 1.2, 25)
    coeffs, _, _ = regularization.charfn_reg_batch(sp, zs, tol=1e-10)
    worst = max(_rel(v, oracles.ref_bessel_charfn_reg(_ALPHA, z))
                for v, z in zip(coeffs[:, 0], zs))
    return worst, 1e-7


def check_bessel_eigs():
    sp = bessel_compact(_ALPHA, _BETA)
    rep = spectra.spectrum(sp, Box(-2.0, 3.9, -0.4, 0.4), tol=1e-10,
                           exclusion_radius=0.28)
    pts = [p.z for p in rep.eigenpoints]
    targets = [1.0 / (_ALPHA + n) for n in range(-3, 4)]
    return _match_targets(pts, targets), 1e-8


def check_bessel_eigvec():
    sp = bessel_compact(_ALPHA, _BETA)
    big_n = 1
    z = 1.0 / (_ALPHA + big_n)
    sl = solution_f(sp, z, (-5, 10), tol=1e-10)
    ref = [oracles.ref_bessel_eigvec(_ALPHA, _BETA, big_n, n)
           for n in range(-5, 11)]
    return _ratio_match(sl.values, ref), 1e-6


# ---------------------------------------------------------------------------
# 3. geometric family
# ---------------------------------------------------------------------------

_Q, _QBETA = 0.5, 0.8


def check_qgeo_charfn():
    sp = q_geometric(_Q, _QBETA)
    rng = np.random.default_rng(9)
    zs = rng.uniform(-2, 2, 25) + 1j * rng.uniform(0.3, 1.5, 25)
    coeffs, _, _ = regularization.charfn_reg_batch(sp, zs, tol=1e-10)
    worst = max(_rel(v, oracles.ref_qgeo_charfn_reg(_Q, _QBETA, z))
                for v, z in zip(coeffs[:, 0], zs))
    return worst, 1e-7


def check_qgeo_zeros():
    sp = q_geometric(_Q, _QBETA)
    rep = spectra.spectrum(sp, Box(-0.7, 2.1, -0.1, 0.1), tol=1e-10,
                           exclusion_radius=0.07)
    pts = [p.z for p in rep.eigenpoints]
    targets = ([_Q ** k for k in range(-1, 4)]
               + [-_QBETA ** 2 * _Q ** k for k in range(4)])
    return _match_targets(pts, targets), 1e-8


def check_qgeo_collision():
    # beta^2 = |q| makes the two zero families collide: -beta^2 q^m = q^{m+1},
    # so those points are double zeros of the renormalized function.
    q, beta = -0.5, math.sqrt(0.5)
    sp = q_geometric(q, beta)
    z0 = q ** 2  # = -beta^2 q = 0.25
    report = spectra.multiplicity(sp, z0, tol=1e-10)
    if report["nu_a"] != 2:
        return math.inf, 1e-6
    slices = spectra.generalized_eigvecs(sp, z0, 2, (-6, 14), tol=1e-10)
    res = spectra.chain_residuals(sp, z0, slices)
    return max(res), 1e-6


# ---------------------------------------------------------------------------
# 4-6. algebraic identities
# ---------------------------------------------------------------------------

def check_detp_identity():
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(50):
        n_win = int(rng.integers(1, 9))
        p = int(rng.integers(1, 4))
        lam = {int(n): complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
               for n in range(-n_win, n_win + 1)}
        wgt = {int(n): complex(rng.uniform(0.2, 1), rng.uniform(-0.5, 0.5))
               for n in range(-n_win, n_win + 1)}
        sp = custom_operator(lambda n, L=lam: L.get(n, 0.0),
                             lambda n, W=wgt: W.get(n, 1.0))
        z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        try:
            res = regularization.detp_finite(sp, p, z, n_win)
        except Exception:
            continue
        worst = max(worst, res.identity_residual)
    return worst, 1e-12


def check_ffunc_oracle():
    rng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(500):
        n = int(rng.integers(0, 13))
        xs = list(rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n))
        full = f_eval(xs)
        scale = max(abs(full), 1e-3)
        worst = max(worst, abs(full - f_eval_bruteforce(xs)) / scale)
        for k in range(1, n):
            left, right = xs[:k], xs[k:]
            split = (f_eval(left) * f_eval(right)
                     - xs[k - 1] * xs[k] * f_eval(xs[:k - 1]) * f_eval(xs[k + 1:]))
            worst = max(worst, abs(full - split) / scale)
    return worst, 1e-12


def check_wronskian():
    rng = np.random.default_rng(14)
    worst = 0.0
    for sp, z in [(linear_free(1.0), 0.4 + 0.9j),
                  (bessel_compact(_ALPHA, _BETA), 0.6 + 0.8j),
                  (q_geometric(_Q, _QBETA), -0.3 + 0.7j)]:
        base = wronskian(sp, z, n=0, tol=1e-12)
        for n in rng.integers(-10, 11, 20):
            worst = max(worst, _rel(wronskian(sp, z, n=int(n), tol=1e-12), base))
    return worst, 1e-8


# ---------------------------------------------------------------------------
# 7-9. resolvent, summation formula, derivatives
# ---------------------------------------------------------------------------

def check_resolvent():
    worst = 0.0
    for sp, z in [(linear_free(1.0), 0.4 + 0.9j),
                  (bessel_compact(_ALPHA, _BETA), 0.6 + 0.8j),
                  (q_geometric(_Q, _QBETA), -0.3 + 0.7j)]:
        j = 0
        g = {i: green(sp, z, i, j, tol=1e-12) for i in range(-11, 12)}
        for i in range(-10, 11):
            lhs = (sp.w(i - 1) * g[i - 1] + (sp.lam(i) - z) * g[i]
                   + sp.w(i) * g[i + 1])
            worst = max(worst, abs(lhs - (1.0 if i == j else 0.0)))
        worst = max(worst, abs(g[3] - green(sp, z, j, 3, tol=1e-12)))
    return worst, 1e-8


def check_green_closed_form():
    sp = bessel_compact(_ALPHA, _BETA)
    z = 0.6 + 0.8j
    worst = 0.0
    for (i, j) in [(0, 0), (2, -1), (-3, 1), (4, 4)]:
        worst = max(worst, _rel(green(sp, z, i, j, tol=1e-12),
                                oracles.ref_bessel_green(_ALPHA, _BETA, z, i, j)))
    return worst, 1e-6


def check_sum_rule():
    worst = 0.0
    for sp, z in [(linear_free(1.0), 1.0),
                  (bessel_compact(_ALPHA, _BETA), 1.0 / (_ALPHA + 1)),
                  (q_geometric(_Q, _QBETA), _Q)]:
        rep = eigvec_sum_identity(sp, z, tol=1e-10, n_probe=1)
        worst = max(worst, rep.residual)
    return worst, 1e-7


def check_bessel_sum_formula():
    # The summation identity specialized to the compact family:
    # sum_n (alpha+n) J_{n-N}^2(2 beta (N+alpha)) = N + alpha.
    big_n = 1
    z = 1.0 / (_ALPHA + big_n)
    sp = bessel_compact(_ALPHA, _BETA)
    v = eigenvector_values(sp, z, -40, 44, tol=1e-11, split=big_n)
    ref = np.array([oracles.ref_bessel_eigvec(_ALPHA, _BETA, big_n, n)
                    for n in range(-40, 45)])
    k = int(np.argmax(np.abs(ref)))
    c = v[k] / ref[k]
    total = complex(np.sum(v * v)) / c ** 2
    return abs(total - (big_n + _ALPHA)) / abs(big_n + _ALPHA), 1e-8


def check_jet_derivative():
    sp = linear_free(1.0)
    rng = np.random.default_rng(15)
    zs = rng.uniform(0.5, 2.5, 10) + 1j * rng.uniform(0.3, 1.0, 10)
    h = 1e-6
    worst = 0.0
    for z in zs:
        cv = regularization.charfn_reg(sp, z, tol=1e-12, order=1)
        fd = ((regularization.charfn_reg(sp, z + h, tol=1e-12).value
               - regularization.charfn_reg(sp, z - h, tol=1e-12).value)
              / (2 * h))
        worst = max(worst, _rel(cv.jet.derivative(1), fd))
    return worst, 1e-6


# ---------------------------------------------------------------------------
# 10. real diagonals give real simple eigenvalues
# ---------------------------------------------------------------------------

def check_real_simple():
    rng = np.random.default_rng(16)
    worst = 0.0
    for _ in range(10):
        alpha = float(rng.uniform(0.25, 0.75))
        beta = float(rng.uniform(0.3, 0.9))
        pert = {int(n): (1.0 / (alpha + n) + float(rng.uniform(-0.02, 0.02)),
                         beta / abs(alpha + n) * float(rng.uniform(0.9, 1.1)))
                for n in rng.integers(-2, 3, 2)}
        sp = bessel_compact(alpha, beta, perturbation=pert)
        rep = spectra.spectrum(sp, Box(0.5, 4.2, -0.3, 0.3), tol=1e-10,
                               exclusion_radius=0.45)
        if not rep.eigenpoints:
            return math.inf, 1e-8
        if any(p.multiplicity != 1 for p in rep.eigenpoints):
            return math.inf, 1e-8
        worst = max(worst, max(abs(p.z.imag) for p in rep.eigenpoints))
    return worst, 1e-8


CHECKS = [
    ("linear-spectrum", check_linear_spectrum),
    ("linear-charfn", check_linear_charfn),
    ("bessel-plain", check_bessel_plain),
    ("bessel-charfn", check_bessel_charfn),
    ("bessel-eigs", check_bessel_eigs),
    ("bessel-eigvec", check_bessel_eigvec),
    ("qgeo-charfn", check_qgeo_charfn),
    ("qgeo-zeros", check_qgeo_zeros),
    ("qgeo-collision", check_qgeo_collision),
    ("detp-identity", check_detp_identity),
    ("ffunc-oracle", check_ffunc_oracle),
    ("wronskian", check_wronskian),
    ("resolvent", check_resolvent),
    ("green-closed-form", check_green_closed_form),
    ("sum-rule", check_sum_rule),
    ("bessel-sum-formula", check_bessel_sum_formula),
    ("jet-derivative", check_jet_derivative),
    ("real-simple", check_real_simple),
]


def run_checks(stream=sys.stdout, checks=None):
    """Run the named checks (all by default); print one line per check."""
    broken = os.environ.get("JSPEC_BREAK") == "1"
    selected = CHECKS if checks is None else [c for c in CHECKS if c[0] in checks]
    all_ok = True
    for name, fn in selected:
        try:
            measured, bound = fn()
        except Exception as exc:  # a crash is a failure, not an abort
            print(f"CHECK {name} FAIL measured=exception({type(exc).__name__}) "
                  f"bound=n/a", file=stream)
            all_ok = False
            continue
        if broken:
            bound = bound * 1e-6
        ok = measured <= bound
        all_ok = all_ok and ok
        print(f"CHECK {name} {'PASS' if ok else 'FAIL'} "
              f"measured={measured:.3e} bound={bound:.1e}", file=stream)
    return all_ok
