"""The alternating pair-product functional on finite sequences.

For a finite sequence x = (x_a, ..., x_b) define

    F(x) = 1 + sum_{m>=1} (-1)^m  sum  x_{k_1} x_{k_1+1} ... x_{k_m} x_{k_m+1}

where the inner sum runs over index tuples a <= k_1 < k_2 < ... < k_m <= b-1
with k_{j+1} - k_j >= 2 (no two chosen adjacent pairs overlap).  Conventions:
F(empty) = 1 and F of a "length -1" sequence is 0; these make the three-term
recurrences below hold at the boundary.

Only the products x_k * x_{k+1} ever enter, which the evaluation engine
exploits heavily elsewhere.  Everything here accepts plain complex numbers or
Jet objects.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NegativeInput, PoleAtBase, TooLong
from .jets import Jet

BRUTE_FORCE_CAP = 32


def f_eval(xs):
    """Evaluate F(x) by the backward three-term recurrence.

    T_i = T_{i+1} - x_i x_{i+1} T_{i+2}, seeded with T past the right end
    equal to 1; the answer is T at the left end.  Works for entries that are
    complex numbers or Jets (jets must share order and base point).
    """
    xs = list(xs)
    n = len(xs)
    one = _one_like(xs)
    if n <= 1:
        return one
    t_next2 = one
    t_next = one
    for i in range(n - 2, -1, -1):
        t = t_next - xs[i] * xs[i + 1] * t_next2
        t_next2, t_next = t_next, t
    return t_next


def f_eval_bruteforce(xs):
    """Literal evaluation of the defining nested sum.  Independent of f_eval.

    Enumerates every admissible tuple of pair-start indices explicitly.
    Exponential cost; sequences longer than 32 raise TooLong.
    """
    xs = [complex(x) for x in xs]
    n = len(xs)
    if n > BRUTE_FORCE_CAP:
        raise TooLong(f"brute-force evaluator capped at {BRUTE_FORCE_CAP} entries, got {n}")
    total = 1.0 + 0.0j
    # stack of (next admissible start index, accumulated signed product)
    stack = [(0, 1.0 + 0.0j)]
    while stack:
        start, prod = stack.pop()
        for k in range(start, n - 1):
            term = -prod * xs[k] * xs[k + 1]
            total += term
            stack.append((k + 2, term))
    return total


def tail_bound(s_total, s_tail):
    """Rigorous truncation bound.

    If s_total >= sum |x_k x_{k+1}| over the full sequence and s_tail bounds
    the same sum over the discarded pairs, then dropping those pairs changes
    F by at most exp(s_total) * (exp(s_tail) - 1).
    """
    s_total = float(s_total)
    s_tail = float(s_tail)
    if not (math.isfinite(s_total) and math.isfinite(s_tail)):
        raise NegativeInput("tail bound inputs must be finite")
    if s_tail < 0 or s_total < 0:
        raise NegativeInput("tail bound inputs must be nonnegative")
    if s_tail > s_total:
        raise NegativeInput("tail sum exceeds total sum")
    return math.exp(min(s_total, 700.0)) * math.expm1(min(s_tail, 700.0))


def pair_sum(xs):
    """sum_k |x_k x_{k+1}| over the sequence; the natural condition number."""
    xs = [complex(getattr(x, "value", x)) for x in xs]
    return float(sum(abs(a * b) for a, b in zip(xs, xs[1:])))


def jet_lift(z0, order, gamma_sqs, lambdas):
    """Lift the standard entries x_k(z) = gamma_k^2 / (z - lambda_k) to jets at z0.

    Returns a list of Jets of the given order.  Raises PoleAtBase if z0
    coincides with one of the lambdas.
    """
    z0 = complex(z0)
    zj = Jet.variable(z0, order)
    out = []
    for g2, lam in zip(gamma_sqs, lambdas):
        if z0 == complex(lam):
            raise PoleAtBase(f"base point {z0} sits on the pole lambda = {lam}")
        out.append(Jet.constant(g2, order, z0) / (zj - complex(lam)))
    return out


def _one_like(xs):
    if xs and isinstance(xs[0], Jet):
        return Jet.constant(1.0, xs[0].order, xs[0].base_point)
    return 1.0 + 0.0j


def f_eval_array(x):
    """Vectorized f_eval: x has shape (K, ...) with entry index first.

    Returns the functional value with shape x.shape[1:].  Used by tests and
    diagnostics; the main engine has its own fused kernels.
    """
    x = np.asarray(x, dtype=np.complex128)
    k = x.shape[0]
    one = np.ones(x.shape[1:], dtype=np.complex128)
    if k <= 1:
        return one
    t2 = one.copy()
    t1 = one.copy()
    for i in range(k - 2, -1, -1):
        t = t1 - x[i] * x[i + 1] * t2
        t2, t1 = t1, t
    return t1
