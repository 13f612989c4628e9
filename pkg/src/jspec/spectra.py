"""Point spectrum via the argument principle.

Zeros of the (renormalized) characteristic function are exactly the
eigenvalues, with zero order equal to algebraic multiplicity.  This module
counts them with winding numbers on rectangles/circles, isolates them by
recursive quadrisection, polishes them with multiplicity-aware Newton steps
(using exact jet derivatives), and certifies each result by a winding count
on a small circle around the candidate.

Functions are passed around as batch evaluators
    fn(zs: ndarray) -> (values, derivatives, abs_error_estimates)
so contour nodes are evaluated in vectorized batches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import engine
from .errors import (ContourDeadlock, DepthExceeded, Inconsistent, NonConvergent,
                     OnContourZero, WindowTooSmall, ZeroVector)
from .charfn import DEFAULT_TOL, solution_f
from .operators import _c2j

MAX_DEPTH = 40
NEWTON_DIAM = 0.55


# ---------------------------------------------------------------------------
# geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Box:
    re_lo: float
    re_hi: float
    im_lo: float
    im_hi: float

    @property
    def center(self):
        return complex(0.5 * (self.re_lo + self.re_hi), 0.5 * (self.im_lo + self.im_hi))

    @property
    def diam(self):
        return max(self.re_hi - self.re_lo, self.im_hi - self.im_lo)

    def contains(self, z, margin=0.0):
        return (self.re_lo - margin <= z.real <= self.re_hi + margin
                and self.im_lo - margin <= z.imag <= self.im_hi + margin)

    def quarters(self, fx=0.5, fy=0.5):
        """Quadrisect at the given fractions (off-center splits let callers
        keep subdivision edges away from zeros sitting at round coordinates)."""
        xm = self.re_lo + fx * (self.re_hi - self.re_lo)
        ym = self.im_lo + fy * (self.im_hi - self.im_lo)
        return [Box(self.re_lo, xm, self.im_lo, ym),
                Box(xm, self.re_hi, self.im_lo, ym),
                Box(self.re_lo, xm, ym, self.im_hi),
                Box(xm, self.re_hi, ym, self.im_hi)]

    def expand(self, factor):
        c = self.center
        hw = 0.5 * (self.re_hi - self.re_lo) * factor
        hh = 0.5 * (self.im_hi - self.im_lo) * factor
        return Box(c.real - hw, c.real + hw, c.imag - hh, c.imag + hh)

    def corners(self):
        return [complex(self.re_lo, self.im_lo), complex(self.re_hi, self.im_lo),
                complex(self.re_hi, self.im_hi), complex(self.re_lo, self.im_hi)]

    def as_list(self):
        return [self.re_lo, self.re_hi, self.im_lo, self.im_hi]


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def contains(self, z, margin=0.0):
        return abs(z - self.center) <= self.radius + margin

    def covers_box(self, box):
        return all(self.contains(c) for c in box.corners())

    def intersects_box(self, box):
        zx = min(max(self.center.real, box.re_lo), box.re_hi)
        zy = min(max(self.center.imag, box.im_lo), box.im_hi)
        return abs(complex(zx, zy) - self.center) <= self.radius

    def to_json(self):
        return {"center": _c2j(self.center), "radius": self.radius}


@dataclass
class Eigenpoint:
    z: complex
    multiplicity: int
    newton_residual: float
    method: str

    def to_json(self):
        return {"z": _c2j(self.z), "multiplicity": self.multiplicity,
                "residual": self.newton_residual, "method": self.method}


@dataclass
class SpectrumReport:
    region: Box
    eigenpoints: list
    excluded_zones: list
    unknown_points: list
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "region": self.region.as_list(),
            "eigenpoints": [p.to_json() for p in self.eigenpoints],
            "excluded_zones": [d.to_json() for d in self.excluded_zones],
            "unknown_points": self.unknown_points,
            "diagnostics": self.diagnostics,
        }


# ---------------------------------------------------------------------------
# winding numbers
# ---------------------------------------------------------------------------

def _contour_quad(contour, n):
    """Trapezoid nodes and dz-weights for a circle or box contour."""
    if isinstance(contour, Disk):
        th = 2.0 * np.pi * np.arange(n) / n
        e = np.exp(1j * th)
        zs = contour.center + contour.radius * e
        ws = 1j * contour.radius * e * (2.0 * np.pi / n)
        return zs, ws
    corners = contour.corners()
    zs, ws = [], []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        step = (b - a) / n
        pts = a + step * np.arange(n + 1)
        wt = np.full(n + 1, step, dtype=np.complex128)
        wt[0] *= 0.5
        wt[-1] *= 0.5
        zs.append(pts)
        ws.append(wt)
    return np.concatenate(zs), np.concatenate(ws)


def winding_count(fn, contour, n_start=16, n_max=1024, tol_int=0.05):
    """(1/2 pi i) of the logarithmic derivative around the contour.

    Composite trapezoid with node doubling until the value is within
    tol_int of an integer and that integer repeats between refinements.
    OnContourZero when a node value is not confidently nonzero.
    """
    prev = None
    n = n_start
    while n <= n_max:
        zs, wts = _contour_quad(contour, n)
        vals, ders, errs = fn(zs)
        floor = np.maximum(5.0 * np.asarray(errs), 1e-280)
        bad = np.abs(vals) <= floor
        if bad.any():
            i = int(np.argmax(bad))
            raise OnContourZero(f"contour node {zs[i]} has |f| = {abs(vals[i]):.3e} "
                                f"below the confidence floor", z=complex(zs[i]))
        w = complex(np.sum(wts * ders / vals)) / (2j * np.pi)
        k = int(round(w.real))
        if abs(w - k) < tol_int and prev == k:
            return k
        prev = k if abs(w - k) < tol_int else None
        n *= 2
    raise NonConvergent(f"winding number did not stabilize on {contour}")


def _winding_jittered(fn, box, jitters=5):
    """Winding on a box, expanding it slightly when a node hits a zero."""
    for k in range(jitters + 1):
        trial = box if k == 0 else box.expand(1.0 + 2e-3 * k)
        try:
            return winding_count(fn, trial), trial
        except (OnContourZero, NonConvergent):
            # a zero sits on (or hugs) the contour; retry slightly expanded
            continue
    raise ContourDeadlock(f"persistent contour zero around {box}")


# ---------------------------------------------------------------------------
# zero location
# ---------------------------------------------------------------------------

def _newton(fn, z0, mult, tol, region, max_iter=50):
    z = complex(z0)
    for _ in range(max_iter):
        vals, ders, _ = fn(np.array([z]))
        v, d = complex(vals[0]), complex(ders[0])
        if d == 0 or not math.isfinite(abs(d)):
            return None
        step = mult * v / d
        z = z - step
        if not region.contains(z, margin=0.5 * region.diam):
            return None
        if abs(step) <= 0.25 * tol:
            vals, _, _ = fn(np.array([z]))
            return z, abs(complex(vals[0]))
    return None


def _certify(fn, z, tol, start_radius):
    """Winding count on a growing circle around z; returns (mult, radius)."""
    r = start_radius
    for _ in range(8):
        try:
            m = winding_count(fn, Disk(z, r))
            return m, r
        except (OnContourZero, NonConvergent):
            r *= 10.0
    return None, r


def locate_zeros(fn, box, tol=DEFAULT_TOL, max_depth=MAX_DEPTH, exclusions=(),
                 fn_fine=None, newton_diam=NEWTON_DIAM, diagnostics=None):
    """All zeros of fn inside box (minus exclusion disks), certified.

    fn is the coarse evaluator used for subdivision windings; fn_fine (same
    protocol, tighter accuracy) is used for Newton polishing and the
    certifying circles.  Returns a list of Eigenpoint sorted by (Re, Im).
    Pass a dict as diagnostics to receive the subdivision depth reached.
    """
    fn_fine = fn_fine or fn
    found = []
    stack = [(box, 0)]
    max_depth_seen = 0
    while stack:
        bx, depth = stack.pop()
        max_depth_seen = max(max_depth_seen, depth)
        if depth > max_depth:
            raise DepthExceeded(f"subdivision beyond depth {max_depth} at {bx}")
        covered = False
        for d in exclusions:
            if d.covers_box(bx):
                covered = True
                break
        if covered:
            continue
        cut = next((d for d in exclusions
                    if d.intersects_box(bx) and bx.diam > 0.5 * d.radius), None)
        if cut is not None:
            stack.extend((q, depth + 1) for q in bx.quarters(0.5117, 0.4883))
            continue
        w, used = _winding_jittered(fn, bx)
        if w <= 0:
            continue
        if bx.diam > newton_diam:
            stack.extend((q, depth + 1) for q in bx.quarters(0.5117, 0.4883))
            continue
        res = _newton(fn_fine, bx.center, w, tol, bx)
        if res is not None:
            zhat, fres = res
            if any(d.contains(zhat) for d in exclusions):
                continue
            m, rc = _certify(fn_fine, zhat, tol, max(8.0 * tol, 1e-12 * (1 + abs(zhat))))
            if m is not None and m >= 1:
                found.append(Eigenpoint(zhat, m, fres, "WINDING+NEWTON"))
                if m >= w:
                    continue
            # missed mass in the box: keep splitting
        if bx.diam > 64.0 * tol:
            stack.extend((q, depth + 1) for q in bx.quarters(0.5117, 0.4883))
        else:
            found.append(Eigenpoint(bx.center, w, math.nan, "WINDING_ONLY"))
    pts = _merge(found, cluster_tol=10.0 * tol)
    pts = [p for p in pts if box.contains(p.z) and
           not any(d.contains(p.z) for d in exclusions)]
    pts.sort(key=lambda p: (p.z.real, p.z.imag))
    if diagnostics is not None:
        diagnostics["subdivision_depth"] = max_depth_seen
    return pts


def _merge(points, cluster_tol):
    """Collapse duplicates; genuinely distinct-but-close zeros are MERGED."""
    out = []
    same_tol = max(cluster_tol, 1e-9)
    for p in sorted(points, key=lambda p: (p.z.real, p.z.imag)):
        host = next((q for q in out if abs(q.z - p.z) <= same_tol), None)
        if host is None:
            out.append(p)
            continue
        if abs(host.z - p.z) <= 0.25 * same_tol:
            # same zero re-found from a neighbouring box: keep the better one
            if (math.isnan(host.newton_residual)
                    or (not math.isnan(p.newton_residual)
                        and p.newton_residual < host.newton_residual)):
                host.z, host.newton_residual = p.z, p.newton_residual
                host.multiplicity = max(host.multiplicity, p.multiplicity)
                host.method = p.method
        else:
            host.z = 0.5 * (host.z + p.z)
            host.multiplicity += p.multiplicity
            host.method = "MERGED"
    return out


# ---------------------------------------------------------------------------
# evaluator adapters
# ---------------------------------------------------------------------------

def _fn_reg(spec, tol_eval):
    def fn(zs):
        coeffs, errs, _ = engine.reg_eval(spec, zs, 1, tol_eval, strict=False)
        vals = coeffs[:, 0]
        return vals, coeffs[:, 1], errs * (1.0 + np.abs(vals))
    return fn


def _fn_plain(spec, tol_eval):
    def fn(zs):
        coeffs, errs, _, _ = engine.plain_eval(spec, zs, 1, tol_eval, strict=False)
        vals = coeffs[:, 0]
        return vals, coeffs[:, 1], errs * (1.0 + np.abs(vals))
    return fn


def _diag_in_region(spec, region, margin, scan=400):
    """Diagonal values lying in (a margin-expanded) region."""
    grown = Box(region.re_lo - margin, region.re_hi + margin,
                region.im_lo - margin, region.im_hi + margin)
    ks = np.arange(-scan, scan + 1)
    lam = spec.lam_array(ks)
    hits = [complex(v) for v in lam if grown.contains(complex(v))]
    # deduplicate accumulation clutter
    out = []
    for v in hits:
        if all(abs(v - u) > 1e-14 for u in out):
            out.append(v)
    return out


# ---------------------------------------------------------------------------
# the headline operation
# ---------------------------------------------------------------------------

def spectrum(spec, region, tol=DEFAULT_TOL, exclusion_radius=0.0):
    """Locate the point spectrum of the operator inside a rectangle.

    With a regularization class the renormalized function is searched on the
    whole region (minus a small origin disk for compact-type classes, whose
    status at 0 is reported in unknown_points rather than computed).  Without
    a class the plain function is searched and a disk around every diagonal
    value is excluded.
    """
    if not isinstance(region, Box):
        region = Box(*region)
    exclusions = []
    unknown = []
    generic = spec.reg_class.kind == "none"
    tol_coarse = max(tol, 1e-6)
    tol_fine = max(min(tol * 1e-2, 1e-11), 1e-13)
    if generic:
        rad = max(exclusion_radius, 1e3 * tol)
        for lam in _diag_in_region(spec, region, margin=rad):
            exclusions.append(Disk(lam, rad))
        if region.contains(0) and spec.name in ("bessel_compact", "q_geometric"):
            exclusions.append(Disk(0.0, rad))
            unknown.append({"z": _c2j(0.0),
                            "note": "accumulation point of the diagonal; status UNKNOWN"})
        fn = _fn_plain(spec, tol_coarse)
        fn_fine = _fn_plain(spec, tol_fine)
    else:
        if spec.reg_class.kind in ("compact", "combined"):
            r0 = max(exclusion_radius, 10.0 * tol)
            if region.contains(0, margin=r0):
                exclusions.append(Disk(0.0, r0))
                note = ("0 in spec(J) (compact operator); eigenvalue status UNKNOWN"
                        if spec.reg_class.kind == "compact"
                        else "accumulation point of the diagonal; status UNKNOWN")
                unknown.append({"z": _c2j(0.0), "note": note})
        fn = _fn_reg(spec, tol_coarse)
        fn_fine = _fn_reg(spec, tol_fine)
    diag = {"tol": tol, "mode": "generic" if generic else spec.reg_class.kind}
    pts = locate_zeros(fn, region, tol=tol, exclusions=exclusions,
                       fn_fine=fn_fine, diagnostics=diag)
    return SpectrumReport(region, pts, exclusions, unknown, diagnostics=diag)


# ---------------------------------------------------------------------------
# multiplicity and chains
# ---------------------------------------------------------------------------

def multiplicity(spec, z0, tol=DEFAULT_TOL):
    """Algebraic multiplicity of a located eigenvalue.

    nu_a = certifying-circle winding; a jet of order nu_a + 1 must show the
    first nonvanishing derivative exactly at order nu_a, else Inconsistent.
    Returns {"nu_a": int, "derivative_profile": [|F^{(k)}|...]}.
    """
    from . import regularization

    z0 = complex(z0)
    generic = spec.reg_class.kind == "none"
    tol_fine = max(min(tol * 1e-2, 1e-11), 1e-13)
    fn = _fn_plain(spec, tol_fine) if generic else _fn_reg(spec, tol_fine)
    r0 = max(100.0 * tol, 1e-6 * (1.0 + abs(z0)))
    nu, r_used = _certify(fn, z0, tol, r0)
    if nu is None or nu < 1:
        raise Inconsistent(f"no zero certified at {z0}", winding=nu)
    if generic:
        from .charfn import charfn
        cv = charfn(spec, z0, tol=tol, order=nu + 1)
    else:
        cv = regularization.charfn_reg(spec, z0, tol=tol, order=nu + 1)
    profile = [abs(cv.jet.derivative(k)) for k in range(nu + 2)]
    scaled = [profile[k] * r_used ** k / math.factorial(k) for k in range(nu + 2)]
    top = max(scaled)
    if top == 0 or any(s > 1e-3 * top for s in scaled[:nu]) or scaled[nu] < 1e-2 * top:
        raise Inconsistent(
            f"winding {nu} at {z0} disagrees with derivative profile {profile}",
            nu=nu, profile=profile)
    return {"nu_a": nu, "derivative_profile": profile}


def generalized_eigvecs(spec, z0, nu, n_range, tol=DEFAULT_TOL):
    """Jordan-chain slices f, f', ..., f^{(nu-1)} at an eigenvalue z0.

    The order-j slice satisfies (J - z0) f^{(j)} = j f^{(j-1)} on the window;
    see chain_residuals for the verification used in tests.
    """
    z0 = complex(z0)
    regularized = spec.reg_class.kind != "none"
    sl = solution_f(spec, z0, n_range, tol=tol, order=max(nu - 1, 1),
                    regularized=regularized)
    out = []
    for j in range(nu):
        vals = sl.jets[:, j] * math.factorial(j)
        out.append(type(sl)(z0, sl.n_lo, sl.n_hi, vals, None, sl.tail_err,
                            sl.window_n, sl.kind + f"^({j})"))
    return out


def chain_residuals(spec, z0, slices):
    """Relative defects of (J - z0) f^{(j)} = j f^{(j-1)} on the interior."""
    res = []
    for j in range(1, len(slices)):
        u = slices[j].values
        v = slices[j - 1].values
        lo = slices[j].n_lo
        num = 0.0
        den = 0.0
        for i in range(1, len(u) - 1):
            n = lo + i
            lhs = (spec.w(n - 1) * u[i - 1] + (spec.lam(n) - z0) * u[i]
                   + spec.w(n) * u[i + 1])
            num += abs(lhs - j * v[i]) ** 2
            den += abs(j * v[i]) ** 2
        res.append(math.sqrt(num) / max(math.sqrt(den), 1e-300))
    return res


# ---------------------------------------------------------------------------
# cross-checks
# ---------------------------------------------------------------------------

def finite_section_zeros(spec, n_section, box, tol=DEFAULT_TOL):
    """Eigenvalues of the finite truncation J_[-N,N] inside box.

    A convergence diagnostic only: finite sections of non-normal operators
    can produce spurious eigenvalues, so results are tagged DIAGNOSTIC.
    """
    if not isinstance(box, Box):
        box = Box(*box)
    ks = np.arange(-n_section, n_section + 1)
    lam = spec.lam_array(ks)
    wsq = spec.w_array(ks[:-1]) ** 2

    def fn(zs):
        zs = np.asarray(zs, dtype=np.complex128)
        dm2 = np.zeros((len(zs), 2), dtype=np.complex128)
        dm1 = np.zeros((len(zs), 2), dtype=np.complex128)
        dm1[:, 0] = 1.0
        for idx in range(len(ks)):
            d = np.empty_like(dm1)
            d[:, 0] = (lam[idx] - zs) * dm1[:, 0]
            d[:, 1] = (lam[idx] - zs) * dm1[:, 1] - dm1[:, 0]
            if idx > 0:
                d -= wsq[idx - 1] * dm2
            dm2, dm1 = dm1, d
        vals = dm1[:, 0]
        return vals, dm1[:, 1], 1e-12 * (1.0 + np.abs(vals))

    pts = locate_zeros(fn, box, tol=tol)
    for p in pts:
        p.method += " DIAGNOSTIC"
    return pts


def residual_norm(spec, z, slc):
    """||(J - z) u||_2 / ||u||_2 over the interior of a solution slice."""
    if slc.n_hi - slc.n_lo < 4:
        raise WindowTooSmall("slice must cover at least 5 indices")
    u = slc.values
    nrm = float(np.linalg.norm(u[1:-1]))
    if nrm <= 1e-300 * max(1.0, float(np.max(np.abs(u)))) or nrm == 0.0:
        raise ZeroVector("slice is numerically zero")
    z = complex(z)
    num = 0.0
    for i in range(1, len(u) - 1):
        n = slc.n_lo + i
        lhs = (spec.w(n - 1) * u[i - 1] + (spec.lam(n) - z) * u[i]
               + spec.w(n) * u[i + 1])
        num += abs(lhs) ** 2
    return math.sqrt(num) / nrm
