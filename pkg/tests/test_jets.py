"""Tests for truncated Taylor (jet) arithmetic."""

import math

import numpy as np
import pytest

from jspec import Jet
from jspec.errors import ZeroArgument
from jspec.jets import jp_const, jp_div, jp_exp, jp_inv, jp_mul, jp_pow_int, jp_var


class TestJetBasics:
    def test_variable(self):
        z = Jet.variable(2.0 + 1.0j, 3)
        np.testing.assert_allclose(z.coeffs, [2.0 + 1.0j, 1.0, 0.0, 0.0])
        assert z.order == 3
        assert z.value == 2.0 + 1.0j

    def test_constant(self):
        c = Jet.constant(5.0, 2, base_point=1.0)
        np.testing.assert_allclose(c.coeffs, [5.0, 0.0, 0.0])

    def test_derivative_factorials(self):
        # (z-1)^3 expanded at z0 = 3: value 8, f' = 12, f'' = 12, f''' = 6
        z = Jet.variable(3.0, 3)
        p = (z - 1.0) * (z - 1.0) * (z - 1.0)
        assert p.value == pytest.approx(8.0)
        assert p.derivative(1) == pytest.approx(12.0)
        assert p.derivative(2) == pytest.approx(12.0)
        assert p.derivative(3) == pytest.approx(6.0)
        assert p.derivative(4) == 0.0

    def test_mixed_scalar_arithmetic(self):
        z = Jet.variable(0.5, 2)
        w = 2.0 * z + 1.0 - z * 0.5
        assert w.value == pytest.approx(1.75)
        assert w.derivative(1) == pytest.approx(1.5)

    def test_division_round_trip(self):
        z = Jet.variable(1.5 + 0.3j, 4)
        a = z * z - 0.7 * z + 2.0
        b = z + 3.0
        np.testing.assert_allclose(((a / b) * b).coeffs, a.coeffs, atol=1e-13)

    def test_division_by_zero_constant_term(self):
        z = Jet.variable(1.0, 2)
        with pytest.raises(ZeroArgument):
            (z + 1.0) / (z - 1.0)

    def test_exp_matches_taylor(self):
        z = Jet.variable(0.4, 4)
        e = z.exp()
        ref = [math.exp(0.4) / math.factorial(k) for k in range(5)]
        np.testing.assert_allclose(e.coeffs, ref, rtol=1e-13)

    def test_order_mismatch_rejected(self):
        with pytest.raises(ValueError):
            Jet.variable(0.0, 1) + Jet.variable(0.0, 2)


class TestCoefficientKernels:
    """The vectorized kernels (coefficients along the last axis) agree with
    scalar Jet arithmetic."""

    def setup_method(self):
        rng = np.random.default_rng(7)
        self.a = rng.uniform(-1, 1, (3, 4)) + 1j * rng.uniform(-1, 1, (3, 4))
        self.b = rng.uniform(-1, 1, (3, 4)) + 1j * rng.uniform(-1, 1, (3, 4))
        self.b[:, 0] += 2.0  # keep constant terms away from 0 for inv/div

    def _row(self, arr, j):
        return Jet(0.0, arr[j])

    def test_mul(self):
        out = jp_mul(self.a, self.b)
        for j in range(3):
            ref = self._row(self.a, j) * self._row(self.b, j)
            np.testing.assert_allclose(out[j], ref.coeffs, atol=1e-14)

    def test_inv_div(self):
        inv = jp_inv(self.b)
        np.testing.assert_allclose(jp_mul(inv, self.b),
                                   jp_const(np.ones(3), 3), atol=1e-13)
        np.testing.assert_allclose(jp_div(self.a, self.b),
                                   jp_mul(self.a, inv), atol=1e-13)

    def test_exp_inverse_pair(self):
        e_plus = jp_exp(self.a)
        e_minus = jp_exp(-self.a)
        np.testing.assert_allclose(jp_mul(e_plus, e_minus),
                                   jp_const(np.ones(3), 3), atol=1e-12)

    def test_pow_int(self):
        cube = jp_pow_int(self.a, 3)
        np.testing.assert_allclose(cube, jp_mul(self.a, jp_mul(self.a, self.a)),
                                   atol=1e-13)

    def test_var(self):
        v = jp_var(np.array([1.0 + 2.0j, 3.0]), 2)
        np.testing.assert_allclose(v[0], [1.0 + 2.0j, 1.0, 0.0])
        np.testing.assert_allclose(v[1], [3.0, 1.0, 0.0])
