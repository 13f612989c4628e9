"""Truncated Taylor arithmetic ("jets").

A jet of order m at a base point z0 stores the coefficients
(c_0, ..., c_m) of a truncated expansion f(z) = sum c_k (z - z0)^k.
The k-th derivative of f at z0 is k! * c_k.

Two layers live here:

* the ``Jet`` class, a small convenience wrapper used at API boundaries;
* array helpers (``jp_*``) operating on numpy arrays whose *last* axis is
  the coefficient axis, vectorized over any leading shape.  The evaluation
  engine works exclusively on these.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ZeroArgument


# ---------------------------------------------------------------------------
# array layer: coefficients along the last axis
# ---------------------------------------------------------------------------

def jp_const(values, order):
    """Embed an array of scalars as order-``order`` jets (constant in z)."""
    values = np.asarray(values, dtype=np.complex128)
    out = np.zeros(values.shape + (order + 1,), dtype=np.complex128)
    out[..., 0] = values
    return out


def jp_var(values, order):
    """Jets of the identity function z evaluated at the given base points."""
    out = jp_const(values, order)
    if order >= 1:
        out[..., 1] = 1.0
    return out


def jp_one(shape, order):
    out = np.zeros(tuple(shape) + (order + 1,), dtype=np.complex128)
    out[..., 0] = 1.0
    return out


def jp_mul(a, b):
    """Truncated Cauchy product along the last axis."""
    a = np.asarray(a)
    b = np.asarray(b)
    m = a.shape[-1]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.complex128)
    for t in range(m):
        for i in range(t + 1):
            out[..., t] += a[..., i] * b[..., t - i]
    return out


def jp_inv(a):
    """Reciprocal jet; the constant term must be nonzero."""
    a = np.asarray(a)
    m = a.shape[-1]
    out = np.zeros_like(a, dtype=np.complex128)
    c0 = a[..., 0]
    out[..., 0] = 1.0 / c0
    for t in range(1, m):
        acc = np.zeros(a.shape[:-1], dtype=np.complex128)
        for i in range(1, t + 1):
            acc += a[..., i] * out[..., t - i]
        out[..., t] = -acc / c0
    return out


def jp_div(a, b):
    return jp_mul(a, jp_inv(b))


def jp_exp(a):
    """exp of a jet via the standard ODE recurrence c_t = (1/t) sum j a_j c_{t-j}."""
    a = np.asarray(a)
    m = a.shape[-1]
    out = np.zeros_like(a, dtype=np.complex128)
    out[..., 0] = np.exp(a[..., 0])
    for t in range(1, m):
        acc = np.zeros(a.shape[:-1], dtype=np.complex128)
        for j in range(1, t + 1):
            acc += j * a[..., j] * out[..., t - j]
        out[..., t] = acc / t
    return out


def jp_pow_int(a, n):
    """Integer power n >= 1 by repeated multiplication (n is always small here)."""
    out = a
    for _ in range(n - 1):
        out = jp_mul(out, a)
    return out


# ---------------------------------------------------------------------------
# object layer
# ---------------------------------------------------------------------------

class Jet:
    """An order-m truncated Taylor expansion at a fixed base point."""

    __slots__ = ("base_point", "coeffs")

    def __init__(self, base_point, coeffs):
        self.base_point = complex(base_point)
        self.coeffs = np.asarray(coeffs, dtype=np.complex128).reshape(-1)

    # construction -----------------------------------------------------
    @classmethod
    def variable(cls, z0, order):
        c = np.zeros(order + 1, dtype=np.complex128)
        c[0] = z0
        if order >= 1:
            c[1] = 1.0
        return cls(z0, c)

    @classmethod
    def constant(cls, value, order, base_point=0.0):
        c = np.zeros(order + 1, dtype=np.complex128)
        c[0] = value
        return cls(base_point, c)

    # inspection -------------------------------------------------------
    @property
    def order(self):
        return len(self.coeffs) - 1

    @property
    def value(self):
        return complex(self.coeffs[0])

    def derivative(self, k=1):
        """k-th derivative of the underlying function at the base point."""
        if k > self.order:
            return 0.0 + 0.0j
        return complex(self.coeffs[k]) * math.factorial(k)

    # arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.order != self.order:
                raise ValueError("jet orders differ")
            return other.coeffs
        c = np.zeros(self.order + 1, dtype=np.complex128)
        c[0] = complex(other)
        return c

    def __add__(self, other):
        return Jet(self.base_point, self.coeffs + self._coerce(other))

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.base_point, -self.coeffs)

    def __sub__(self, other):
        return Jet(self.base_point, self.coeffs - self._coerce(other))

    def __rsub__(self, other):
        return Jet(self.base_point, self._coerce(other) - self.coeffs)

    def __mul__(self, other):
        return Jet(self.base_point, jp_mul(self.coeffs, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        den = self._coerce(other)
        if den[0] == 0:
            raise ZeroArgument("division by a jet with zero constant term")
        return Jet(self.base_point, jp_div(self.coeffs, den))

    def __rtruediv__(self, other):
        if self.coeffs[0] == 0:
            raise ZeroArgument("division by a jet with zero constant term")
        return Jet(self.base_point, jp_div(self._coerce(other), self.coeffs))

    def exp(self):
        return Jet(self.base_point, jp_exp(self.coeffs))

    def __repr__(self):
        return f"Jet(base={self.base_point!r}, coeffs={list(self.coeffs)!r})"
