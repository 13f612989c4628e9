"""Internal evaluation engine.

Everything the public modules expose funnels into two windowed three-term
recurrences, run over jets (truncated Taylor coefficients along the last
array axis) and vectorized over batches of evaluation points:

* the *paired* recurrence  D_k = A_k D_{k-1} - B_k D_{k-2}  with
      A_k = (z - lambda_k) e^{sigma_k} / s_k,
      B_k = w_{k-1}^2 e^{sigma_{k-1} + sigma_k} / (s_{k-1} s_k),
  which evaluates the renormalized window value
      prod_k [(z - lambda_k) e^{sigma_k}/s_k] * F(window entries)
  in one stable sweep.  Choosing (s_k, sigma_k) per index pairs each pole
  factor 1/(z - lambda_k) hidden in the functional entry with the matching
  renormalization factor, so nothing ever blows up, including exactly on
  the diagonal values lambda_n;

* the *plain* recurrence (A_k = 1, B_k = x_{k-1} x_k), which evaluates the
  bare functional F on a window of entries x_k = gamma_k^2 / (z - lambda_k).

Truncated windows converge only O(1/N) for algebraically decaying
operators, far too slow for the target tolerances, so window values are
computed on dyadic levels N, 2N, 4N, ... and Neville-extrapolated to
N = infinity in the variable h = 1/N.  The difference of the last two
extrapolants is the reported error estimate.  Geometrically decaying
operators converge fast enough that a single window driven by the rigorous
tail bound suffices.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .errors import Budget, NoTailBound, PoleHit, ZeroArgument
from .jets import jp_exp, jp_inv, jp_mul, jp_one, jp_var
from .operators import MATCH_TOL

LEVEL_START = 64
LEVEL_CAP = 1 << 14
CHUNK = 32


# ---------------------------------------------------------------------------
# fused sweep kernels
# ---------------------------------------------------------------------------

@njit(cache=True)
def _kernel_last(A, B):
    """Run D_k = A_k D_{k-1} - B_k D_{k-2} (jet-valued) and return the final D."""
    K, npts, m = A.shape
    out = np.zeros((npts, m), np.complex128)
    for p in range(npts):
        dm2 = np.zeros(m, np.complex128)
        dm1 = np.zeros(m, np.complex128)
        dm1[0] = 1.0
        cur = np.zeros(m, np.complex128)
        for k in range(K):
            for t in range(m):
                acc = 0.0j
                for i in range(t + 1):
                    acc += A[k, p, i] * dm1[t - i] - B[k, p, i] * dm2[t - i]
                cur[t] = acc
            tmp = dm2
            dm2 = dm1
            dm1 = cur
            cur = tmp
        out[p, :] = dm1
    return out


@njit(cache=True)
def _kernel_all(A, B):
    """Same sweep, returning every prefix value D_k."""
    K, npts, m = A.shape
    out = np.zeros((K, npts, m), np.complex128)
    for p in range(npts):
        dm2 = np.zeros(m, np.complex128)
        dm1 = np.zeros(m, np.complex128)
        dm1[0] = 1.0
        cur = np.zeros(m, np.complex128)
        for k in range(K):
            for t in range(m):
                acc = 0.0j
                for i in range(t + 1):
                    acc += A[k, p, i] * dm1[t - i] - B[k, p, i] * dm2[t - i]
                cur[t] = acc
            tmp = dm2
            dm2 = dm1
            dm1 = cur
            cur = tmp
            out[k, p, :] = dm1
    return out


def sweep_last(A, B):
    return _kernel_last(np.ascontiguousarray(A), np.ascontiguousarray(B))


def sweep_all(A, B):
    return _kernel_all(np.ascontiguousarray(A), np.ascontiguousarray(B))


def reverse_ab(A, B):
    """Map (A, B) of the forward sweep to run the same window right-to-left.

    The functional is invariant under reversing the window; the reversed
    coupling B'_i pairs the same adjacent indices, shifted by one slot.
    """
    Ar = A[::-1]
    Br = np.zeros_like(B)
    Br[1:] = B[1:][::-1]
    return Ar, Br


# ---------------------------------------------------------------------------
# pairing providers
# ---------------------------------------------------------------------------

def styles_for(reg):
    """(plus-side, minus-side) pairing styles for a RegClass."""
    return {
        "compact": ("c", "c"),
        "compact_resolvent": ("r", "r"),
        "combined": ("c", "r"),
    }[reg.kind]


def build_r(spec, zj, ks, style_plus, style_minus, p):
    """Renormalization jets R_k = e^{sigma_k} / s_k for every window index.

    Styles: 'c' pairs with (1 - lambda/z) exp-factors (s = z), 'r' pairs with
    (1 - z/lambda) exp-factors (s = -lambda, and s = 1 when lambda = 0),
    'b' leaves the bare factor (z - lambda) untouched (R = 1).
    """
    K = len(ks)
    npts, m = zj.shape
    lam = spec.lam_array(ks)
    R = np.empty((K, npts, m), dtype=np.complex128)
    inv_z = None
    for mask, style in ((ks >= 1, style_plus), (ks <= 0, style_minus)):
        if not mask.any():
            continue
        if style == "b":
            R[mask] = jp_one((int(mask.sum()), npts), m - 1)
            continue
        lam_g = lam[mask][:, None, None]
        if style == "c":
            if inv_z is None:
                inv_z = jp_inv(zj)
            u = lam_g * inv_z[None]
            R[mask] = jp_mul(_exp_corrections(u, p), inv_z[None])
        elif style == "r":
            sub = np.empty((int(mask.sum()), npts, m), dtype=np.complex128)
            zero = lam_g[:, 0, 0] == 0
            if np.any(~zero):
                lam_nz = lam_g[~zero]
                u = zj[None] * (1.0 / lam_nz)
                sub[~zero] = _exp_corrections(u, p) * (-1.0 / lam_nz)
            if np.any(zero):
                sub[zero] = jp_one((int(zero.sum()), npts), m - 1)
            R[mask] = sub
        else:
            raise ValueError(f"unknown pairing style {style!r}")
    return R, lam


def _exp_corrections(u, p):
    """exp(sum_{j=1}^{p-1} u^j / j) as jets; the order-p convergence factor."""
    sigma = np.zeros_like(u)
    power = None
    for j in range(1, p):
        power = u if power is None else jp_mul(power, u)
        sigma = sigma + power / j
    return jp_exp(sigma)


def paired_ab(spec, zj, ks, style_plus, style_minus, p):
    """(A, B) arrays of the paired recurrence over the window ks (contiguous)."""
    R, lam = build_r(spec, zj, ks, style_plus, style_minus, p)
    K = len(ks)
    npts, m = zj.shape
    zml = np.broadcast_to(zj[None], (K, npts, m)).copy()
    zml[..., 0] -= lam[:, None]
    A = jp_mul(zml, R)
    B = np.zeros_like(A)
    if K > 1:
        wsq = spec.w_array(ks[:-1]) ** 2
        B[1:] = wsq[:, None, None] * jp_mul(R[:-1], R[1:])
    return A, B


def plain_ab(spec, zj, ks):
    """(A, B) of the bare functional sweep; A = 1, B_k = x_{k-1} x_k."""
    K = len(ks)
    npts, m = zj.shape
    lam = spec.lam_array(ks)
    z0 = zj[..., 0]
    dist = np.abs(z0[None, :] - lam[:, None])
    bad = dist <= MATCH_TOL * (1.0 + np.abs(z0[None, :]))
    if bad.any():
        ki, pi = np.argwhere(bad)[0]
        raise PoleHit(f"z = {z0[pi]} coincides with lambda_{ks[ki]}",
                      index=int(ks[ki]), z=complex(z0[pi]))
    zml = np.broadcast_to(zj[None], (K, npts, m)).copy()
    zml[..., 0] -= lam[:, None]
    g2 = spec.gamma.array(int(ks[0]), int(ks[-1]))
    x = g2[:, None, None] * jp_inv(zml)
    A = jp_one((K, npts), m - 1)
    B = np.zeros_like(A)
    if K > 1:
        B[1:] = jp_mul(x[:-1], x[1:])
    return A, B


# ---------------------------------------------------------------------------
# window policies
# ---------------------------------------------------------------------------

def _neville(hs, vals):
    t = [np.array(v, dtype=np.complex128) for v in vals]
    for j in range(1, len(t)):
        for i in range(len(t) - 1, j - 1, -1):
            t[i] = t[i] + (t[i] - t[i - 1]) * (hs[i] / (hs[i - j] - hs[i]))
    return t[-1]


def adaptive_levels(eval_at, tol, n_start=LEVEL_START, n_cap=LEVEL_CAP, what="window",
                    strict=True):
    """Evaluate on dyadic windows and Neville-extrapolate until stable.

    eval_at(N) must return an ndarray of window values; returns
    (extrapolated, relative_error, N_last).  With strict=False the best
    available estimate and its error are returned instead of raising when
    the window cap is reached.
    """
    hs, vals = [], []
    ex_prev = None
    err = None
    n = n_start
    while n <= n_cap:
        vals.append(eval_at(n))
        hs.append(1.0 / n)
        if len(vals) >= 2:
            ex = _neville(hs, vals)
            if ex_prev is not None:
                scale = 1.0 + np.abs(ex)
                err = np.abs(ex - ex_prev) / scale
                if len(vals) >= 3 and float(np.max(err)) <= tol:
                    return ex, err, n
            ex_prev = ex
        n *= 2
    if not strict and ex_prev is not None and err is not None:
        return ex_prev, err, n // 2
    raise Budget(f"{what} cap {n_cap} reached before tolerance {tol}", tol=tol)


def geometric_window(bound_fn, tol, n_floor=48, n_cap=8192):
    """Smallest window whose rigorous tail bound sits safely under tol."""
    n = max(48, n_floor)
    while n <= n_cap:
        b = bound_fn(n)
        if math.isfinite(b) and b <= 0.1 * tol:
            return n, b
        n = max(n + 8, int(n * 1.4))
    raise Budget(f"no window up to {n_cap} meets tail tolerance {tol}", tol=tol)


# ---------------------------------------------------------------------------
# batch evaluators
# ---------------------------------------------------------------------------

def _pert_floor(spec):
    return max((abs(n) for n in spec.perturbation), default=0) + 2


def reg_eval(spec, zs, order, tol, strict=True):
    """Renormalized characteristic function as jets at a batch of points.

    Returns (coeffs (npts, order+1), rel_err (npts,), window_n).  With
    strict=False a best-effort value is returned when the window budget is
    exhausted (the reported error then exceeds tol).
    """
    reg = spec.reg_class
    if reg.kind == "none":
        raise ZeroArgument("operator has no regularization class; use the plain function")
    zs = np.asarray(zs, dtype=np.complex128).ravel()
    if reg.kind in ("compact", "combined") and np.any(zs == 0):
        raise ZeroArgument("renormalized function undefined at z = 0 for this class")
    sp, sm = styles_for(reg)
    coeffs = np.empty((len(zs), order + 1), dtype=np.complex128)
    errs = np.empty(len(zs))
    win = 0
    for lo in range(0, len(zs), CHUNK):
        sel = slice(lo, min(lo + CHUNK, len(zs)))
        zj = jp_var(zs[sel], order)

        def eval_at(n):
            ks = np.arange(-n, n + 1)
            a, b = paired_ab(spec, zj, ks, sp, sm, reg.p)
            return sweep_last(a, b)

        if spec.tail_kind == "geometric":
            v, err, n = _geo_eval(spec, zs[sel], eval_at, tol)
        else:
            v, err, n = adaptive_levels(
                eval_at, tol, n_start=max(LEVEL_START, _pert_floor(spec)),
                strict=strict)
            err = np.max(err, axis=-1)
        coeffs[sel] = v
        errs[sel] = err
        win = max(win, n)
    return coeffs, errs, win


def _geo_eval(spec, zs, eval_at, tol):
    bound = getattr(spec.family, "reg_tail_bound", None)
    floor = _pert_floor(spec)
    if bound is not None:
        n, b = geometric_window(
            lambda nn: max(bound(z, nn) for z in zs), tol, n_floor=floor)
        v = eval_at(n)
        # cheap self-check: one enlarged window
        v2 = eval_at(int(n * 1.25) + 4)
        scale = 1.0 + np.abs(v2)
        err = np.maximum(np.max(np.abs(v2 - v) / scale, axis=-1), b)
        return v2, err, n
    # no rigorous bound: self-consistent doubling
    n = max(64, floor)
    v = eval_at(n)
    while n <= 4096:
        n2 = 2 * n
        v2 = eval_at(n2)
        scale = 1.0 + np.abs(v2)
        err = np.max(np.abs(v2 - v) / scale, axis=-1)
        if float(np.max(err)) <= tol:
            return v2, err, n2
        n, v = n2, v2
    raise Budget("self-consistent window search exhausted", tol=tol)


def plain_eval(spec, zs, order, tol, strict=True):
    """Bare characteristic function as jets.  PoleHit on the diagonal values."""
    zs = np.asarray(zs, dtype=np.complex128).ravel()
    coeffs = np.empty((len(zs), order + 1), dtype=np.complex128)
    errs = np.empty(len(zs))
    cond = np.zeros(len(zs))
    win = 0
    for lo in range(0, len(zs), CHUNK):
        sel = slice(lo, min(lo + CHUNK, len(zs)))
        zj = jp_var(zs[sel], order)
        cond_box = {}

        def eval_at(n):
            ks = np.arange(-n, n + 1)
            a, b = plain_ab(spec, zj, ks)
            cond_box["sum"] = np.sum(np.abs(b[1:, :, 0]), axis=0)
            return sweep_last(a, b)

        if spec.tail_kind == "geometric":
            v, err, n = _geo_plain(spec, zs[sel], eval_at, tol)
        else:
            v, err, n = adaptive_levels(
                eval_at, tol, n_start=max(LEVEL_START, _pert_floor(spec)),
                strict=strict)
            err = np.max(err, axis=-1)
        coeffs[sel] = v
        errs[sel] = err
        cond[sel] = cond_box.get("sum", 0.0)
        win = max(win, n)
    return coeffs, errs, win, cond


def _geo_plain(spec, zs, eval_at, tol):
    floor = _pert_floor(spec)

    def bound(nn):
        try:
            return max(spec.pair_tail_bound(z, nn) for z in zs)
        except NoTailBound:
            return math.inf

    try:
        n, s_tail = geometric_window(bound, tol, n_floor=floor)
    except Budget:
        n, s_tail = None, None
    if n is not None:
        v = eval_at(n)
        v2 = eval_at(int(n * 1.25) + 4)
        scale = 1.0 + np.abs(v2)
        err = np.maximum(np.max(np.abs(v2 - v) / scale, axis=-1), s_tail)
        return v2, err, n
    return _geo_eval(spec, zs, eval_at, tol)  # falls back to self-consistency


# ---------------------------------------------------------------------------
# solution slices
# ---------------------------------------------------------------------------

def reg_f_slice(spec, z, a, b, order, tol):
    """Renormalized decaying-to-the-right solution on indices a..b at one z.

    Returns (coeffs (b-a+1, order+1), rel_err (b-a+1,), window_n).
    """
    reg = spec.reg_class
    sp, _ = styles_for(reg)
    zj = jp_var(np.array([z]), order)

    def eval_at(n_win):
        ks = np.arange(a + 1, n_win + 1)
        A, B = paired_ab(spec, zj, ks, sp, "b", reg.p)
        Ar, Br = reverse_ab(A, B)
        out = sweep_all(Ar, Br)[:, 0, :]       # out[i] = value over [K-1-i .. K-1]
        K = len(ks)
        rows = [out[K - 1 - (n - a)] for n in range(a, b + 1)]
        return np.stack(rows)

    vals, err, win = _slice_window(spec, z, eval_at, tol, right=True, lo=a, hi=b)
    pref = _pref_f(spec, zj, a, b, sp, reg.p)
    out = jp_mul(pref, vals)
    return out, np.max(err, axis=-1) if err.ndim > 1 else err, win


def reg_g_slice(spec, z, a, b, order, tol):
    """Renormalized decaying-to-the-left solution on indices a..b at one z."""
    reg = spec.reg_class
    _, sm = styles_for(reg)
    zj = jp_var(np.array([z]), order)

    def eval_at(n_win):
        ks = np.arange(-n_win, b)               # window [-N .. b-1]
        A, B = paired_ab(spec, zj, ks, "b", sm, reg.p)
        out = sweep_all(A, B)[:, 0, :]          # out[j] = value over [-N .. ks[j]]
        rows = []
        for n in range(a, b + 1):
            j = (n - 1) + n_win                 # position of k = n-1
            rows.append(out[j])
        return np.stack(rows)

    vals, err, win = _slice_window(spec, z, eval_at, tol, right=False, lo=a, hi=b)
    pref = _pref_g(spec, zj, a, b, sm, reg.p)
    out = jp_mul(pref, vals)
    return out, np.max(err, axis=-1) if err.ndim > 1 else err, win


def plain_f_slice(spec, z, a, b, order, tol, skip_poles=()):
    """Bare decaying-to-the-right solution; PoleHit unless poles are skipped."""
    zj = jp_var(np.array([z]), order)

    def eval_at(n_win):
        ks = np.arange(a + 1, n_win + 1)
        A, B = plain_ab(spec, zj, ks)
        Ar, Br = reverse_ab(A, B)
        out = sweep_all(Ar, Br)[:, 0, :]
        K = len(ks)
        return np.stack([out[K - 1 - (n - a)] for n in range(a, b + 1)])

    vals, err, win = _slice_window(spec, z, eval_at, tol, right=True, lo=a, hi=b)
    pref = np.stack([_p_factor_jet(spec, zj, n, skip_poles) for n in range(a, b + 1)])
    out = jp_mul(pref, vals)
    return out, np.max(err, axis=-1) if err.ndim > 1 else err, win


def plain_g_slice(spec, z, a, b, order, tol, skip_poles=()):
    """Bare decaying-to-the-left solution."""
    zj = jp_var(np.array([z]), order)

    def eval_at(n_win):
        ks = np.arange(-n_win, b)
        A, B = plain_ab(spec, zj, ks)
        out = sweep_all(A, B)[:, 0, :]
        return np.stack([out[(n - 1) + n_win] for n in range(a, b + 1)])

    vals, err, win = _slice_window(spec, z, eval_at, tol, right=False, lo=a, hi=b)
    rows = []
    for n in range(a, b + 1):
        pj = _p_factor_jet(spec, zj, n - 1, skip_poles)
        wn1 = spec.w(n - 1)
        rows.append(jp_inv(wn1 * pj))
    out = jp_mul(np.stack(rows), vals)
    return out, np.max(err, axis=-1) if err.ndim > 1 else err, win


def slice_levels(eval_at, tol, n_start=LEVEL_START, n_cap=LEVEL_CAP):
    """adaptive_levels variant for vector-valued slices.

    An entry counts as converged when its own relative error meets tol, or
    -- once enough levels are in -- when its error has stopped decreasing:
    backward error amplification (strongest at eigenvalues, far from the
    window) puts a conditioning floor under some entries, and refining the
    window further cannot improve them.  Such entries keep their large
    reported error so callers can mask them.
    """
    hs, vals = [], []
    ex_prev = None
    err_prev = None
    n = n_start
    while n <= n_cap:
        vals.append(eval_at(n))
        hs.append(1.0 / n)
        if len(vals) >= 2:
            ex = _neville(hs, vals)
            if ex_prev is not None:
                err = np.abs(ex - ex_prev) / (1.0 + np.abs(ex))
                done = err <= tol
                if len(vals) >= 5 and err_prev is not None:
                    done = done | (err > 0.3 * err_prev)
                if len(vals) >= 3 and bool(np.all(done)):
                    return ex, err, n
                err_prev = err
            ex_prev = ex
        n *= 2
    raise Budget(f"slice window cap {n_cap} reached before tolerance {tol}", tol=tol)


def _slice_window(spec, z, eval_at, tol, right, lo=None, hi=None):
    """Window policy for one-sided slice sweeps."""
    floor = _pert_floor(spec)
    if right:
        # window [lo+1 .. N] must comfortably cover the whole slice
        floor = max(floor, (hi if hi is not None else 0) + 8)
    else:
        # window [-N .. hi-1] must reach below the slice
        floor = max(floor, 8 - (lo if lo is not None else 0))
    if spec.tail_kind == "geometric":
        bound = getattr(spec.family, "reg_tail_bound", None)
        if bound is not None:
            try:
                n, _ = geometric_window(lambda nn: bound(z, nn), tol, n_floor=floor)
            except Budget:
                n = 512
        else:
            n = 256
        v = eval_at(n)
        v2 = eval_at(int(n * 1.25) + 4)
        scale = 1.0 + np.abs(v2)
        err = np.abs(v2 - v) / scale
        return v2, err, n
    vals, err, n = slice_levels(eval_at, tol, n_start=max(LEVEL_START, floor))
    return vals, err, n


def _pref_f(spec, zj, a, b, style_plus, p):
    """Prefactors multiplying the right-window values of the renormalized f."""
    m = zj.shape[-1]
    nb = b - a + 1
    out = np.empty((nb, m), dtype=np.complex128)
    if b >= 1:
        R, _ = build_r(spec, zj, np.arange(1, b + 1), style_plus, "b", p)
        R = R[:, 0, :]
    acc = {0: jp_one((), m - 1)}
    cur = acc[0]
    for n in range(1, b + 1):
        cur = jp_mul(cur, spec.w(n - 1) * R[n - 1])
        acc[n] = cur
    cur = acc[0]
    for n in range(0, a - 1, -1):
        cur = cur / spec.w(n - 1)
        acc[n - 1] = cur
    for i, n in enumerate(range(a, b + 1)):
        out[i] = acc[n]
    return out


def _pref_g(spec, zj, a, b, style_minus, p):
    """Prefactors multiplying the left-window values of the renormalized g."""
    m = zj.shape[-1]
    nb = b - a + 1
    out = np.empty((nb, m), dtype=np.complex128)
    if a <= 0:
        R, _ = build_r(spec, zj, np.arange(a, 1), "b", style_minus, p)
        R = R[:, 0, :]

        def r_at(k):
            return R[k - a]
    core = {1: jp_one((), m - 1)}       # core[n] = prod_{k=n}^{0} w_{k-1} R_k
    cur = core[1]
    for n in range(0, a - 1, -1):
        cur = jp_mul(cur, spec.w(n - 1) * r_at(n))
        core[n] = cur
    cur = core[1]
    for n in range(2, b + 1):           # core[n] = prod_{k=1}^{n-1} 1 / w_{k-1}
        cur = cur / spec.w(n - 2)
        core[n] = cur
    for i, n in enumerate(range(a, b + 1)):
        out[i] = core[n] / spec.w(n - 1)
    return out


def _p_factor_jet(spec, zj, n, skip_poles=()):
    """Jet-valued transfer normalization P_n(z)."""
    m = zj.shape[-1]
    out = jp_one((), m - 1)
    zrow = zj[0]
    if n >= 1:
        for k in range(1, n + 1):
            out = out * spec.w(k - 1)
            if k in skip_poles:
                continue
            den = zrow.copy()
            den[0] -= spec.lam(k)
            if den[0] == 0:
                raise PoleHit(f"z = lambda_{k}", index=k)
            out = jp_mul(out, jp_inv(den))
    elif n <= -1:
        for k in range(n + 1, 1):
            if k not in skip_poles:
                num = zrow.copy()
                num[0] -= spec.lam(k)
                out = jp_mul(out, num)
            out = out / spec.w(k - 1)
    return out
