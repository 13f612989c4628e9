"""Self-contained reference evaluators.

Everything here is implemented from scratch (power series, classical
asymptotics, infinite products) with no dependence on the evaluation engine
or on scipy, so it can serve as an independent oracle in tests:

* complex log-gamma / gamma / digamma,
* Bessel J of complex order and argument,
* q-Pochhammer symbols and the 0phi1 basic hypergeometric series,
* closed-form reference values for the three built-in operator families.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import PoleArgument

_B2N = (1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730,
        7.0 / 6, -3617.0 / 510)


def log_gamma(z):
    """Principal log of the gamma function via shift + Stirling series."""
    z = complex(z)
    if z.real <= 0.5 and abs(z.imag) < 1e-13 and abs(z.real - round(z.real)) < 1e-13:
        raise PoleArgument(f"gamma pole at z = {z}")
    acc = 0.0 + 0.0j
    while z.real < 12.0:
        acc += cmath.log(z)
        z += 1.0
    out = (z - 0.5) * cmath.log(z) - z + 0.5 * math.log(2.0 * math.pi)
    zp = z
    for n, b in enumerate(_B2N, start=1):
        out += b / ((2 * n) * (2 * n - 1) * zp)
        zp *= z * z
    return out - acc


def gamma_fn(z):
    return cmath.exp(log_gamma(z))


def rgamma(z):
    """1 / gamma(z); zero at the poles instead of raising."""
    z = complex(z)
    if z.real <= 0.5 and abs(z.imag) < 1e-13 and abs(z.real - round(z.real)) < 1e-13:
        return 0.0 + 0.0j
    return cmath.exp(-log_gamma(z))


def digamma(z):
    """psi(z) by the recurrence shift and the asymptotic series."""
    z = complex(z)
    if z.real <= 0.5 and abs(z.imag) < 1e-13 and abs(z.real - round(z.real)) < 1e-13:
        raise PoleArgument(f"digamma pole at z = {z}")
    acc = 0.0 + 0.0j
    while z.real < 12.0:
        acc += 1.0 / z
        z += 1.0
    out = cmath.log(z) - 0.5 / z
    zp = z * z
    for n, b in enumerate(_B2N, start=1):
        out -= b / (2 * n * zp)
        zp *= z * z
    return out - acc


def bessel_j(nu, x, tol=1e-15, max_terms=400):
    """J_nu(x) for complex order and argument, by the defining power series."""
    nu = complex(nu)
    x = complex(x)
    if abs(nu.imag) < 1e-13 and abs(nu.real - round(nu.real)) < 1e-13 and nu.real < 0:
        n = int(round(nu.real))
        return (-1) ** n * bessel_j(-n, x, tol=tol, max_terms=max_terms)
    if x == 0:
        if nu == 0:
            return 1.0 + 0.0j
        return 0.0 + 0.0j
    lh = cmath.log(x / 2.0)
    total = 0.0 + 0.0j
    calm = 0
    for k in range(max_terms):
        g = rgamma(nu + k + 1)
        if g == 0:
            term = 0.0 + 0.0j
        else:
            term = (-1) ** k * cmath.exp((nu + 2 * k) * lh - log_gamma(k + 1)) * g
        total += term
        if abs(term) <= tol * max(abs(total), 1e-300) and 2 * k > abs(x):
            calm += 1
            if calm >= 3:
                return total
        else:
            calm = 0
    return total


def qpochhammer(a, q, tol=1e-16, max_terms=100000):
    """(a; q)_inf = prod_{k>=0} (1 - a q^k) for |q| < 1."""
    a = complex(a)
    q = complex(q)
    if not abs(q) < 1:
        raise ValueError("need |q| < 1")
    out = 1.0 + 0.0j
    t = a
    for _ in range(max_terms):
        out *= 1.0 - t
        t *= q
        if abs(t) < tol * (1.0 - abs(q)):
            break
    return out


def qpochhammer_n(a, q, n):
    """Finite product (a; q)_n."""
    out = 1.0 + 0.0j
    t = complex(a)
    for _ in range(n):
        out *= 1.0 - t
        t *= q
    return out


def qhyp_0phi1(b, q, z, tol=1e-16, max_terms=500):
    """The basic hypergeometric series 0phi1(-; b; q, z).

    sum_k z^k q^{k(k-1)} / ((q; q)_k (b; q)_k); entire in z for |q| < 1.
    """
    b = complex(b)
    q = complex(q)
    z = complex(z)
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    for k in range(1, max_terms):
        den = (1.0 - q ** k) * (1.0 - b * q ** (k - 1))
        if den == 0:
            raise PoleArgument(f"0phi1 parameter b = {b} hits a pole at term {k}")
        term *= z * q ** (2 * (k - 1)) / den
        total += term
        if abs(term) < tol * max(abs(total), 1e-300):
            break
    return total


# ---------------------------------------------------------------------------
# closed-form references for the built-in families
# ---------------------------------------------------------------------------

def ref_linear_charfn_reg(z):
    """Renormalized characteristic function of the linear family: sin(pi z)/pi."""
    return cmath.sin(math.pi * complex(z)) / math.pi


def ref_linear_eigvec(w, big_n, n):
    """Eigenvector entry at the integer eigenvalue big_n: (-1)^n J_{n-N}(2w)."""
    return (-1) ** n * bessel_j(n - big_n, 2.0 * complex(w))


def ref_bessel_charfn_reg(alpha, z):
    """sin(pi(alpha - 1/z))/sin(pi alpha) * exp(pi cot(pi alpha)/z)."""
    alpha = complex(alpha)
    z = complex(z)
    cot = cmath.cos(math.pi * alpha) / cmath.sin(math.pi * alpha)
    return (cmath.sin(math.pi * (alpha - 1.0 / z)) / cmath.sin(math.pi * alpha)
            * cmath.exp(math.pi * cot / z))


def ref_bessel_eigvec(alpha, beta, big_n, n):
    """sqrt(alpha+n) J_{n-N}(2 beta (N+alpha)): eigenvector at 1/(alpha+N)."""
    alpha = complex(alpha)
    return cmath.sqrt(alpha + n) * bessel_j(n - big_n, 2.0 * complex(beta) * (big_n + alpha))


def ref_bessel_green(alpha, beta, z, i, j):
    """Closed-form resolvent entry of the inverse-linear diagonal family (i >= j)."""
    alpha = complex(alpha)
    beta = complex(beta)
    z = complex(z)
    if i < j:
        i, j = j, i
    nu_i = i + alpha - 1.0 / z
    nu_j = -j - alpha + 1.0 / z
    pref = ((-1) ** (j + 1) * math.pi * cmath.sqrt((i + alpha) * (j + alpha))
            / (z * cmath.sin(math.pi * (alpha - 1.0 / z))))
    return pref * bessel_j(nu_i, 2.0 * beta / z) * bessel_j(nu_j, 2.0 * beta / z)


def ref_qgeo_charfn_reg(q, beta, z):
    """(z; q)_inf (q/z; q)_inf (-beta^2/z; q)_inf."""
    q = complex(q)
    z = complex(z)
    return (qpochhammer(z, q) * qpochhammer(q / z, q)
            * qpochhammer(-complex(beta) ** 2 / z, q))


def ref_qgeo_charfn(q, beta, z):
    """Plain characteristic function of the geometric family: (-beta^2/z; q)_inf."""
    return qpochhammer(-complex(beta) ** 2 / complex(z), complex(q))


def ref_qgeo_fvec(q, beta, z, n):
    """Renormalized decaying-to-the-right solution of the geometric family.

    z^{-n} beta^n q^{n(n-1)/4} (q^{n+1}/z; q)_inf
        * 0phi1(-; q^{n+1}/z; q, -q^{n+1} beta^2 / z^2).
    """
    q = complex(q)
    beta = complex(beta)
    z = complex(z)
    lq = cmath.log(q)
    b = q ** (n + 1) / z
    return (z ** (-n) * beta ** n * cmath.exp(n * (n - 1) / 4.0 * lq)
            * qpochhammer(b, q)
            * qhyp_0phi1(b, q, -q ** (n + 1) * beta ** 2 / z ** 2))


def bessel_sum_check(alpha, beta, big_n, half_width=60):
    """sum_n (alpha+n) J_{n-N}^2(2 beta (N+alpha)) / (N+alpha); equals 1."""
    alpha = complex(alpha)
    x = 2.0 * complex(beta) * (big_n + alpha)
    total = 0.0 + 0.0j
    for n in range(big_n - half_width, big_n + half_width + 1):
        total += (alpha + n) * bessel_j(n - big_n, x) ** 2
    return total / (big_n + alpha)


def jn_array(orders, x):
    return np.array([bessel_j(n, x) for n in orders], dtype=np.complex128)
