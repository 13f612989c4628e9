"""Characteristic function, decaying solutions, and the resolvent.

The characteristic function of an operator spec is the value of the
alternating pair-product functional on the doubly infinite entry sequence
x_k = gamma_k^2 / (z - lambda_k).  It is analytic off the closure of the
diagonal values, vanishes exactly at the eigenvalues, and ties together:

* f_n(z): the solution of the eigenvalue recurrence decaying as n -> +inf,
* g_n(z): the solution decaying as n -> -inf,
* the Wronskian  w_n (f_n g_{n+1} - f_{n+1} g_n), which is n-independent
  and equals the characteristic function,
* the resolvent  G_{i,j}(z) = - f_max(i,j) g_min(i,j) / F(z).

The renormalized variants (see the regularization module) are used
automatically when the spec carries a regularization class; the plain
variants raise PoleHit on the diagonal values, except that an exact hit is
resolved by a certified limit when the singularity is removable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import engine
from .errors import NearSpectrum, PoleHit, ZeroVector
from .jets import Jet
from .operators import pole_book

DEFAULT_TOL = 1e-10


@dataclass
class CharValue:
    """A characteristic-function evaluation with its error bookkeeping."""

    z: complex
    value: complex
    jet: Jet | None
    tail_err: float
    window_n: int
    condition_sum: float
    regularized: bool
    note: str = ""


@dataclass
class SolutionSlice:
    """Values of a decaying solution on a contiguous index range."""

    z: complex
    n_lo: int
    n_hi: int
    values: np.ndarray          # shape (n_hi-n_lo+1,) complex
    jets: np.ndarray | None     # shape (n, order+1) when a jet was requested
    tail_err: np.ndarray
    window_n: int
    kind: str                   # "f", "g", "f_reg", "g_reg"

    def value(self, n):
        return complex(self.values[n - self.n_lo])

    @property
    def indices(self):
        return np.arange(self.n_lo, self.n_hi + 1)


# ---------------------------------------------------------------------------
# plain characteristic function
# ---------------------------------------------------------------------------

def charfn(spec, z, tol=DEFAULT_TOL, order=0):
    """Plain characteristic function at z (optionally as a jet).

    On an exact diagonal hit the removable limit is attempted: the function
    is evaluated at shrinking offsets and extrapolated to the point; if the
    extrapolants do not settle, the singularity is genuine and PoleHit is
    raised.
    """
    z = complex(z)
    try:
        coeffs, errs, win, cond = engine.plain_eval(spec, [z], order, tol)
    except PoleHit:
        return _charfn_limit(spec, z, tol, order)
    jet = Jet(z, coeffs[0]) if order > 0 else None
    return CharValue(z, complex(coeffs[0, 0]), jet, float(errs[0]), win,
                     float(cond[0]), regularized=False)


def _charfn_limit(spec, z, tol, order):
    """Certified limit of the plain function onto a removable singularity."""
    h0 = 1e-4 * (1.0 + abs(z))
    direction = _safe_direction(spec, z)
    hs, vals = [], []
    ex_prev, err = None, math.inf
    win = 0
    for i in range(8):
        h = h0 * 0.5 ** i
        try:
            coeffs, _, win, _ = engine.plain_eval(spec, [z + h * direction], order, tol)
        except PoleHit:
            continue
        hs.append(h)
        vals.append(coeffs[0])
        if len(vals) >= 3:
            ex = engine._neville(hs, vals)
            if ex_prev is not None:
                err = float(np.max(np.abs(ex - ex_prev))) / (1.0 + float(np.max(np.abs(ex))))
                if err <= 100 * tol:
                    jet = Jet(z, ex) if order > 0 else None
                    return CharValue(z, complex(ex[0]), jet, err, win, math.nan,
                                     regularized=False, note="removable-limit")
            ex_prev = ex
    raise PoleHit(f"z = {z} lies on a diagonal value and the limit does not settle",
                  z=z, limit_err=err)


def _safe_direction(spec, z):
    """A unit direction along which z + h stays off the other diagonal values."""
    for ang in (0.37, 1.1, 2.03, 2.9):
        d = complex(math.cos(ang), math.sin(ang))
        book = pole_book(spec, z + 1e-5 * (1 + abs(z)) * d)
        if not book.indices:
            return d
    return 1.0 + 0.0j


def charfn_jet(spec, z, order, tol=DEFAULT_TOL):
    """Jet of the plain characteristic function; derivative k is k! * coeff k."""
    return charfn(spec, z, tol=tol, order=order)


# ---------------------------------------------------------------------------
# decaying solutions
# ---------------------------------------------------------------------------

def solution_f(spec, z, n_range, tol=DEFAULT_TOL, order=0, regularized=None):
    """The solution decaying as n -> +inf on n_range = (lo, hi) inclusive."""
    return _solution(spec, z, n_range, tol, order, regularized, side="f")


def solution_g(spec, z, n_range, tol=DEFAULT_TOL, order=0, regularized=None):
    """The solution decaying as n -> -inf on n_range = (lo, hi) inclusive."""
    return _solution(spec, z, n_range, tol, order, regularized, side="g")


def _solution(spec, z, n_range, tol, order, regularized, side):
    z = complex(z)
    a, b = int(n_range[0]), int(n_range[1])
    if b < a:
        raise ValueError("empty index range")
    if regularized is None:
        regularized = spec.reg_class.kind != "none"
    if regularized:
        fn = engine.reg_f_slice if side == "f" else engine.reg_g_slice
        kind = side + "_reg"
    else:
        fn = engine.plain_f_slice if side == "f" else engine.plain_g_slice
        kind = side
    coeffs, err, win = fn(spec, z, a, b, order, tol)
    jets = coeffs if order > 0 else None
    return SolutionSlice(z, a, b, coeffs[:, 0].copy(), jets,
                         np.atleast_1d(err), win, kind)


def recurrence_residual(spec, slc):
    """Max relative defect of the three-term recurrence on the slice interior.

    Checks w_{n-1} u_{n-1} + lambda_n u_n + w_n u_{n+1} = z u_n for
    n_lo < n < n_hi.  A direct quality check on any solution slice.
    """
    z = slc.z
    u = slc.values
    worst = 0.0
    for i in range(1, len(u) - 1):
        n = slc.n_lo + i
        lhs = spec.w(n - 1) * u[i - 1] + spec.lam(n) * u[i] + spec.w(n) * u[i + 1]
        scale = max(abs(z * u[i]), abs(spec.w(n - 1) * u[i - 1]),
                    abs(spec.w(n) * u[i + 1]), 1e-300)
        worst = max(worst, abs(lhs - z * u[i]) / scale)
    return worst


# ---------------------------------------------------------------------------
# derived quantities
# ---------------------------------------------------------------------------

def wronskian(spec, z, n=0, tol=DEFAULT_TOL):
    """w_n (f_n g_{n+1} - f_{n+1} g_n); independent of n, equals charfn(z).

    On an exact diagonal hit the removable limit is attempted, matching
    charfn's behaviour.
    """
    z = complex(z)
    try:
        f = solution_f(spec, z, (n, n + 1), tol=tol, regularized=False)
        g = solution_g(spec, z, (n, n + 1), tol=tol, regularized=False)
    except PoleHit:
        return _wronskian_limit(spec, z, n, tol)
    return spec.w(n) * (f.values[0] * g.values[1] - f.values[1] * g.values[0])


def _wronskian_limit(spec, z, n, tol):
    h0 = 1e-4 * (1.0 + abs(z))
    direction = _safe_direction(spec, z)
    hs, vals = [], []
    ex_prev = None
    for i in range(8):
        h = h0 * 0.5 ** i
        try:
            vals.append(np.array([wronskian(spec, z + h * direction, n, tol)]))
        except PoleHit:
            continue
        hs.append(h)
        if len(vals) >= 3:
            ex = engine._neville(hs, vals)
            if ex_prev is not None:
                err = abs(ex[0] - ex_prev[0]) / (1.0 + abs(ex[0]))
                if err <= 100 * tol:
                    return complex(ex[0])
            ex_prev = ex
    raise PoleHit(f"Wronskian limit at z = {z} does not settle", z=z)


def wronskian_reg(spec, z, n=0, tol=DEFAULT_TOL):
    """Renormalized Wronskian; equals the renormalized characteristic function."""
    f = solution_f(spec, z, (n, n + 1), tol=tol, regularized=True)
    g = solution_g(spec, z, (n, n + 1), tol=tol, regularized=True)
    return spec.w(n) * (f.values[0] * g.values[1] - f.values[1] * g.values[0])


def a_ratio(spec, z, n=0, tol=DEFAULT_TOL, regularized=None):
    """The proportionality factor f_n / g_n.

    At an eigenvalue both decaying solutions span the same line, so the
    ratio is independent of n; it is the constant appearing in the
    squared-eigenvector sum rule.  Returns (ratio, consistency) where
    consistency is the relative spread of the ratio over n and n+1.
    """
    f = solution_f(spec, z, (n, n + 1), tol=tol, regularized=regularized)
    g = solution_g(spec, z, (n, n + 1), tol=tol, regularized=regularized)
    r0 = f.values[0] / g.values[0]
    r1 = f.values[1] / g.values[1]
    spread = abs(r0 - r1) / max(abs(r0), abs(r1), 1e-300)
    return r0, spread


def eigenvector_values(spec, z, n_lo, n_hi, tol=DEFAULT_TOL, regularized=None,
                       split=0):
    """Eigenvector entries on n_lo..n_hi assembled from both sweeps.

    A one-sided windowed sweep loses accuracy exponentially on the side
    where the complementary solution grows, so entries right of `split`
    come from the rightward-decaying solution and entries left of it from
    the leftward-decaying one, matched through their ratio at the split
    index (the two solutions are proportional at an eigenvalue).
    """
    split = min(max(split, n_lo), n_hi)
    fsl = solution_f(spec, z, (split, n_hi), tol=tol, regularized=regularized)
    if split == n_lo:
        return fsl.values
    gsl = solution_g(spec, z, (n_lo, split), tol=tol, regularized=regularized)
    fs, gs = fsl.value(split), gsl.value(split)
    if fs == 0 or gs == 0:
        raise ZeroVector(f"solution vanishes at the split index {split}; "
                         "pick another split")
    return np.concatenate([(fs / gs) * gsl.values[:-1], fsl.values])


@dataclass
class SumRuleReport:
    z: complex
    lhs: complex            # sum of squared solution values
    rhs: complex            # ratio * derivative of the characteristic function
    residual: float
    n_used: int


def eigvec_sum_identity(spec, z, tol=DEFAULT_TOL, regularized=None, n_probe=0,
                        n_max=256):
    """Check sum_n f_n(z)^2 = A(z) * F'(z) at an eigenvalue z.

    The sum is truncated adaptively where the eigenvector has decayed to
    numerical noise.  Uses the renormalized quantities when the spec has a
    regularization class (the identity holds verbatim for them, since both
    sides scale by the same z-dependent factor).
    """
    from . import regularization  # cycle-free: regularization imports engine only

    z = complex(z)
    if regularized is None:
        regularized = spec.reg_class.kind != "none"

    half = 24
    while True:
        v = eigenvector_values(spec, z, n_probe - half, n_probe + half,
                               tol=tol, regularized=regularized, split=n_probe)
        peak = float(np.max(np.abs(v)))
        if max(abs(v[0]), abs(v[-1])) <= 1e-9 * peak or half >= n_max:
            break
        half *= 2
    lhs = complex(np.sum(v * v))

    ratio, _ = a_ratio(spec, z, n=n_probe, tol=tol, regularized=regularized)
    if regularized:
        cv = regularization.charfn_reg(spec, z, tol=tol, order=1)
    else:
        cv = charfn(spec, z, tol=tol, order=1)
    dF = cv.jet.derivative(1)
    rhs = ratio * dF
    residual = abs(lhs - rhs) / (1.0 + abs(rhs))
    return SumRuleReport(z, lhs, rhs, residual, 2 * half + 1)


# ---------------------------------------------------------------------------
# resolvent
# ---------------------------------------------------------------------------

def green(spec, z, i, j, tol=DEFAULT_TOL, regularized=None):
    """Resolvent matrix entry G_{i,j}(z) = <e_i, (J - z)^{-1} e_j>.

    Symmetric in (i, j).  Raises NearSpectrum when the characteristic
    function is too small to divide by safely.
    """
    z = complex(z)
    i, j = int(i), int(j)
    hi, lo = max(i, j), min(i, j)
    if regularized is None:
        regularized = spec.reg_class.kind != "none"
    if regularized:
        from . import regularization
        cv = regularization.charfn_reg(spec, z, tol=tol)
    else:
        cv = charfn(spec, z, tol=tol)
    fval = complex(cv.value)
    scale = math.exp(min(cv.condition_sum if math.isfinite(cv.condition_sum) else 0.0, 30.0))
    if abs(fval) <= 1e-8 * scale:
        raise NearSpectrum(f"|F({z})| = {abs(fval):.3e} is below the safety threshold",
                           z=z, value=fval)
    f = solution_f(spec, z, (hi, hi), tol=tol, regularized=regularized)
    g = solution_g(spec, z, (lo, lo), tol=tol, regularized=regularized)
    return -f.values[0] * g.values[0] / fval
