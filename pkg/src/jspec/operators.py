"""Doubly infinite Jacobi operator descriptions.

An operator is given by its diagonal sequence lambda_n and off-diagonal
sequence w_n (n in Z, w_n != 0).  Three built-in families with known decay
structure are provided, plus a fully custom family driven by callbacks:

* ``bessel_compact``  : lambda_n = 1/(n + alpha), w_n = beta / sqrt((n+alpha)(n+1+alpha))
* ``linear_free``     : lambda_n = n,             w_n = w (constant)
* ``q_geometric``     : lambda_n = q^n,           w_n = beta * q^(n/2)
* ``custom_operator`` : arbitrary callables, with optional tail metadata

Finite perturbations (overrides of lambda_n / w_n on finitely many indices)
are supported everywhere.  Each spec carries a regularization class telling
the evaluation engine how to renormalize the divergent infinite products.
"""

from __future__ import annotations

import cmath
import json
import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousMatch, ConfigError, NoTailBound, PoleHit

MATCH_TOL = 1e-12


# ---------------------------------------------------------------------------
# regularization classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegClass:
    """How the characteristic function is renormalized.

    kind:
      "none"               no renormalization (plain function only)
      "compact"            pair each pole factor with (1 - lambda/z) * exp-corrections
      "compact_resolvent"  pair with (1 - z/lambda) * exp-corrections
      "combined"           compact pairing for n >= 1, resolvent pairing for n <= 0
    p: order of the exponential convergence factors (corrections sum_{j<p} u^j/j).
    """

    kind: str
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "compact", "compact_resolvent", "combined"):
            raise ConfigError(f"unknown regularization kind {self.kind!r}")
        if self.kind != "none" and self.p < 1:
            raise ConfigError("regularization order p must be >= 1")


REG_NONE = RegClass("none")


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------

class _Family:
    name = "custom"
    tail_kind = None  # "algebraic" | "geometric" | None

    def lam(self, n):
        raise NotImplementedError

    def w(self, n):
        raise NotImplementedError

    def lam_array(self, ks):
        return np.array([self.lam(int(k)) for k in ks], dtype=np.complex128)

    def w_array(self, ks):
        return np.array([self.w(int(k)) for k in ks], dtype=np.complex128)

    def pole_candidates(self, z):
        """Candidate indices n with lambda_n possibly equal to z, or None."""
        return None

    def pair_tail_bound(self, z, n_window):
        """Upper bound on sum |x_k x_{k+1}| over |k| >= n_window for the plain
        entries x_k = gamma_k^2 / (z - lambda_k); math.inf when the window is
        too small for the bound to apply."""
        raise NoTailBound(f"family {self.name} has no tail bound")

    def default_reg(self):
        return REG_NONE

    def params(self):
        return {}


class BesselFamily(_Family):
    name = "bessel_compact"
    tail_kind = "algebraic"

    def __init__(self, alpha, beta):
        alpha = complex(alpha)
        beta = complex(beta)
        if beta == 0:
            raise ConfigError("beta must be nonzero")
        if abs(alpha.imag) < 1e-14 and abs(alpha.real - round(alpha.real)) < 1e-14:
            raise ConfigError("alpha must not be an integer (lambda_n would blow up)")
        self.alpha = alpha
        self.beta = beta

    def lam(self, n):
        return 1.0 / (n + self.alpha)

    def w(self, n):
        # principal square roots taken factor by factor: this branch choice
        # matches the closed-form eigenvector entries sqrt(alpha+n) J_{n-N}
        return self.beta / (np.sqrt(n + self.alpha + 0j)
                            * np.sqrt(n + 1 + self.alpha + 0j))

    def lam_array(self, ks):
        return 1.0 / (np.asarray(ks, dtype=np.complex128) + self.alpha)

    def w_array(self, ks):
        ks = np.asarray(ks, dtype=np.complex128)
        return self.beta / (np.sqrt(ks + self.alpha) * np.sqrt(ks + 1 + self.alpha))

    def pole_candidates(self, z):
        if z == 0:
            return []
        t = 1.0 / z - self.alpha
        n0 = int(round(t.real))
        return [n0 - 1, n0, n0 + 1]

    def pair_tail_bound(self, z, n_window):
        a = abs(self.alpha)
        if n_window <= a + 2:
            return math.inf
        m = 1.0 / (n_window - 1 - a)      # |lambda_k| <= m for |k| >= n_window
        d = abs(z) - m
        if d <= 0:
            return math.inf
        ssum = 2.0 * abs(self.beta) ** 2 / (n_window - a)   # sum |w_k|^2 tail
        return ssum / d**2

    def default_reg(self):
        return RegClass("compact", p=2)

    def params(self):
        return {"alpha": self.alpha, "beta": self.beta}


class LinearFamily(_Family):
    name = "linear_free"
    tail_kind = "algebraic"

    def __init__(self, w):
        w = complex(w)
        if w == 0:
            raise ConfigError("w must be nonzero")
        self.w_const = w

    def lam(self, n):
        return complex(n)

    def w(self, n):
        return self.w_const

    def lam_array(self, ks):
        return np.asarray(ks, dtype=np.complex128)

    def w_array(self, ks):
        return np.full(len(ks), self.w_const, dtype=np.complex128)

    def pole_candidates(self, z):
        return [int(round(z.real))]

    def pair_tail_bound(self, z, n_window):
        if n_window <= abs(z) + 2:
            return math.inf
        return 2.0 * abs(self.w_const) ** 2 / (n_window - 1 - abs(z))

    def default_reg(self):
        return RegClass("compact_resolvent", p=2)

    def params(self):
        return {"w": self.w_const}


class QGeometricFamily(_Family):
    name = "q_geometric"
    tail_kind = "geometric"

    def __init__(self, q, beta):
        q = complex(q)
        beta = complex(beta)
        if not 0 < abs(q) < 1:
            raise ConfigError("q must satisfy 0 < |q| < 1")
        if beta == 0:
            raise ConfigError("beta must be nonzero")
        self.q = q
        self.beta = beta
        self._log_q = cmath.log(q)

    def lam(self, n):
        return self.q ** n

    def w(self, n):
        return self.beta * cmath.exp(0.5 * n * self._log_q)

    def lam_array(self, ks):
        ks = np.asarray(ks)
        return np.exp(np.asarray(ks, dtype=np.complex128) * self._log_q)

    def w_array(self, ks):
        return self.beta * np.exp(0.5 * np.asarray(ks, dtype=np.complex128) * self._log_q)

    def pole_candidates(self, z):
        if z == 0:
            return []
        n0 = int(round(math.log(abs(z)) / math.log(abs(self.q))))
        return [n0 - 1, n0, n0 + 1]

    def pair_tail_bound(self, z, n_window):
        aq = abs(self.q)
        ab2 = abs(self.beta) ** 2
        az = abs(z)
        if az == 0:
            return math.inf
        # right side k >= N: |lambda_k| <= |q|^N, need it below |z|
        mr = aq ** n_window
        if az <= 2 * mr:
            return math.inf
        right = ab2 * aq ** n_window / ((1 - aq) * (az - mr) ** 2)
        # left side k <= -N: |lambda_k| >= |q|^{-N}, need it above 2|z|
        ml = aq ** (-n_window)
        if ml <= 2 * az:
            return math.inf
        left = 4.0 * ab2 * aq ** (n_window - 1) / (1 - aq)
        return right + left

    def reg_tail_bound(self, z, n_window):
        """Bound on the relative error from truncating the paired window,
        i.e. |prod over |k| > N of paired factors  - 1|."""
        aq = abs(self.q)
        az = abs(z)
        if az == 0:
            return math.inf
        s_plus = aq ** (n_window + 1) / ((1 - aq) * az)          # sum |lambda_k / z|, k > N
        s_minus = az * aq ** (n_window + 1) / (1 - aq)           # sum |z / lambda_k|, k < -N
        if s_plus > 0.5 or s_minus > 0.5:
            return math.inf
        t = 2.0 * (s_plus + s_minus)
        return math.expm1(t) + self.pair_tail_bound(z, n_window)

    def default_reg(self):
        return RegClass("combined", p=1)

    def params(self):
        return {"q": self.q, "beta": self.beta}


class CustomFamily(_Family):
    name = "custom"

    def __init__(self, lam_fn, w_fn, tail_kind=None, pair_tail=None, pole_solver=None):
        self.lam_fn = lam_fn
        self.w_fn = w_fn
        self.tail_kind = tail_kind
        self._pair_tail = pair_tail
        self._pole_solver = pole_solver

    def lam(self, n):
        return complex(self.lam_fn(n))

    def w(self, n):
        v = complex(self.w_fn(n))
        if v == 0:
            raise ConfigError(f"w_{n} = 0 is not a valid Jacobi operator")
        return v

    def pole_candidates(self, z):
        if self._pole_solver is not None:
            return list(self._pole_solver(z))
        return None

    def pair_tail_bound(self, z, n_window):
        if self._pair_tail is None:
            raise NoTailBound("custom operator declared no tail bound")
        return float(self._pair_tail(z, n_window))

    def params(self):
        return {}


# ---------------------------------------------------------------------------
# operator spec
# ---------------------------------------------------------------------------

class GammaSquared:
    """Memoized squares gamma_n^2 with gamma_0^2 = 1, gamma_{n+1}^2 = w_n^2 / gamma_n^2.

    Only squares are ever needed: the functional entries enter through the
    products x_k x_{k+1}, which see gamma_k^2 gamma_{k+1}^2 = w_k^2.
    """

    def __init__(self, spec):
        self._spec = spec
        self._memo = {0: 1.0 + 0.0j}
        self._lock = threading.Lock()

    def value(self, n):
        with self._lock:
            return self._value(n)

    def _value(self, n):
        memo = self._memo
        if n in memo:
            return memo[n]
        spec = self._spec
        if n > 0:
            k = max(i for i in memo if i <= n)
            for i in range(k, n):
                memo[i + 1] = spec.w(i) ** 2 / memo[i]
        else:
            k = min(i for i in memo if i >= n)
            for i in range(k, n, -1):
                memo[i - 1] = spec.w(i - 1) ** 2 / memo[i]
        return memo[n]

    def array(self, a, b):
        """gamma_k^2 for k = a..b inclusive, as a numpy array."""
        with self._lock:
            self._value(a)
            self._value(b)
            return np.array([self._memo[k] for k in range(a, b + 1)], dtype=np.complex128)


class OperatorSpec:
    """A doubly infinite Jacobi operator plus its regularization class."""

    def __init__(self, family, perturbation=None, reg_class=None):
        self.family = family
        self.perturbation = dict(perturbation or {})
        for n, (lam_o, w_o) in self.perturbation.items():
            if w_o is not None and complex(w_o) == 0:
                raise ConfigError(f"perturbed w_{n} must be nonzero")
        self.reg_class = reg_class if reg_class is not None else family.default_reg()
        self.gamma = GammaSquared(self)

    # sequences ----------------------------------------------------------
    def lam(self, n):
        ov = self.perturbation.get(n)
        if ov is not None and ov[0] is not None:
            return complex(ov[0])
        return self.family.lam(n)

    def w(self, n):
        ov = self.perturbation.get(n)
        if ov is not None and ov[1] is not None:
            return complex(ov[1])
        return self.family.w(n)

    def lam_array(self, ks):
        ks = np.asarray(ks)
        out = self.family.lam_array(ks)
        if self.perturbation:
            self._apply_overrides(ks, out, 0)
        return out

    def w_array(self, ks):
        ks = np.asarray(ks)
        out = self.family.w_array(ks)
        if self.perturbation:
            self._apply_overrides(ks, out, 1)
        return out

    def _apply_overrides(self, ks, out, slot):
        for n, ov in self.perturbation.items():
            if ov[slot] is not None:
                out[ks == n] = complex(ov[slot])

    def gamma_sq(self, n):
        return self.gamma.value(n)

    # metadata -----------------------------------------------------------
    @property
    def tail_kind(self):
        return self.family.tail_kind

    @property
    def name(self):
        return self.family.name

    def pair_tail_bound(self, z, n_window):
        nmax = max((abs(n) for n in self.perturbation), default=0)
        if n_window <= nmax + 1:
            return math.inf
        return self.family.pair_tail_bound(z, n_window)

    def to_json(self):
        doc = {"family": self.family.name}
        for key, val in self.family.params().items():
            doc[key] = _c2j(val)
        if self.perturbation:
            doc["perturbation"] = [
                {"n": n,
                 **({"lambda": _c2j(ov[0])} if ov[0] is not None else {}),
                 **({"w": _c2j(ov[1])} if ov[1] is not None else {})}
                for n, ov in sorted(self.perturbation.items())
            ]
        return doc

    def __repr__(self):
        return f"OperatorSpec({self.family.name}, reg={self.reg_class.kind}:{self.reg_class.p})"


# constructors ------------------------------------------------------------

def bessel_compact(alpha, beta, perturbation=None):
    return OperatorSpec(BesselFamily(alpha, beta), perturbation)


def linear_free(w, perturbation=None):
    return OperatorSpec(LinearFamily(w), perturbation)


def q_geometric(q, beta, perturbation=None):
    return OperatorSpec(QGeometricFamily(q, beta), perturbation)


def custom_operator(lam_fn, w_fn, perturbation=None, reg_class=None,
                    tail_kind=None, pair_tail=None, pole_solver=None):
    fam = CustomFamily(lam_fn, w_fn, tail_kind=tail_kind, pair_tail=pair_tail,
                       pole_solver=pole_solver)
    return OperatorSpec(fam, perturbation, reg_class=reg_class or REG_NONE)


def _c2j(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _j2c(doc, what="value"):
    try:
        if isinstance(doc, dict):
            return complex(float(doc["re"]), float(doc.get("im", 0.0)))
        return complex(doc)
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot parse {what} from {doc!r}") from exc


def spec_from_json(doc):
    """Build an OperatorSpec from a JSON-style dict (the CLI config format)."""
    if not isinstance(doc, dict) or "family" not in doc:
        raise ConfigError("config must be an object with a 'family' field")
    fam = doc["family"]
    pert = {}
    for entry in doc.get("perturbation", []) or []:
        try:
            n = int(entry["n"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("perturbation entries need an integer 'n'") from exc
        lam_o = _j2c(entry["lambda"], "lambda override") if "lambda" in entry else None
        w_o = _j2c(entry["w"], "w override") if "w" in entry else None
        pert[n] = (lam_o, w_o)
    pert = pert or None
    if fam == "bessel_compact":
        return bessel_compact(_j2c(doc["alpha"], "alpha"), _j2c(doc["beta"], "beta"), pert)
    if fam == "linear_free":
        return linear_free(_j2c(doc["w"], "w"), pert)
    if fam == "q_geometric":
        return q_geometric(_j2c(doc["q"], "q"), _j2c(doc["beta"], "beta"), pert)
    raise ConfigError(f"unknown family {fam!r}")


def load_spec(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return spec_from_json(doc)


# ---------------------------------------------------------------------------
# pole bookkeeping
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PoleBook:
    """Indices n with lambda_n = z, split by the side they affect."""

    indices: tuple
    r_plus: int   # matches with n >= 1
    r_minus: int  # matches with n <= 0

    @property
    def r(self):
        return self.r_plus + self.r_minus


def pole_indices(spec, z, window=None, match_tol=MATCH_TOL):
    """All n with lambda_n = z (up to match_tol, exact inversion for built-ins)."""
    z = complex(z)
    hits = {}
    cands = spec.family.pole_candidates(z)
    if cands is None:
        if window is None:
            raise NoTailBound("custom operator without pole solver needs an explicit window")
        cands = range(-window, window + 1)
    extra = list(spec.perturbation.keys())
    seen = set()
    for n in list(cands) + extra:
        n = int(n)
        if n in seen:
            continue
        seen.add(n)
        lam = spec.lam(n)
        if abs(lam - z) <= match_tol * (1.0 + abs(z)):
            hits[n] = lam
    if spec.family.name == "custom" and len({v for v in hits.values()}) > 1:
        raise AmbiguousMatch(f"indices {sorted(hits)} all match z = {z} with unequal values")
    idx = tuple(sorted(hits))
    return idx


def pole_book(spec, z, window=None, match_tol=MATCH_TOL):
    idx = pole_indices(spec, z, window=window, match_tol=match_tol)
    rp = sum(1 for n in idx if n >= 1)
    return PoleBook(idx, rp, len(idx) - rp)


# ---------------------------------------------------------------------------
# finite products of the transfer normalization
# ---------------------------------------------------------------------------

def p_factor(spec, n, z, skip_poles=()):
    """The normalization product P_n(z).

    P_0 = 1; P_n = prod_{k=1}^{n} w_{k-1} / (z - lambda_k) for n >= 1;
    P_n = prod_{k=n+1}^{0} (z - lambda_k) / w_{k-1} for n <= -1.
    Indices listed in skip_poles have their (z - lambda_k) factor omitted
    (used when taking limits onto a pole).
    """
    z = complex(z)
    out = 1.0 + 0.0j
    if n >= 1:
        for k in range(1, n + 1):
            out *= spec.w(k - 1)
            if k in skip_poles:
                continue
            d = z - spec.lam(k)
            if d == 0:
                raise PoleHit(f"z = lambda_{k} = {z}")
            out /= d
    elif n <= -1:
        for k in range(n + 1, 1):
            if k in skip_poles:
                pass
            else:
                out *= z - spec.lam(k)
            out /= spec.w(k - 1)
    return out


# ---------------------------------------------------------------------------
# summability diagnostics
# ---------------------------------------------------------------------------

@dataclass
class ConditionReport:
    z: complex
    windows: list
    partial_sums: list
    tail_bounds: list
    verdict: str
    notes: str = ""


def summability_report(spec, z, windows=(16, 32, 64, 128, 256)):
    """Partial sums of |x_k x_{k+1}| over growing windows plus tail bounds.

    Verdict CONVERGENT when a finite tail bound confirms the sums have
    stabilized; INCONCLUSIVE otherwise (always for custom operators without
    tail metadata).
    """
    z = complex(z)
    sums, tails = [], []
    for nw in windows:
        ks = np.arange(-nw, nw + 1)
        lam = spec.lam_array(ks)
        g2 = spec.gamma.array(-nw, nw)
        dif = z - lam
        if np.any(dif == 0):
            raise PoleHit(f"z = {z} hits a diagonal value inside the window")
        x = g2 / dif
        sums.append(float(np.sum(np.abs(x[:-1] * x[1:]))))
        try:
            tails.append(float(spec.pair_tail_bound(z, nw)))
        except NoTailBound:
            tails.append(math.inf)
    finite = [t for t in tails if math.isfinite(t)]
    if finite and finite[-1] < 1e-6 * (1.0 + sums[-1]):
        verdict = "CONVERGENT"
        notes = ""
    else:
        verdict = "INCONCLUSIVE"
        notes = "no finite tail bound small enough to certify convergence"
    return ConditionReport(z, list(windows), sums, tails, verdict, notes)
