"""Tests for the alternating pair-product functional and its jet lifting."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jspec import f_eval, f_eval_bruteforce, jet_lift, pair_sum, tail_bound
from jspec.errors import NegativeInput, PoleAtBase, TooLong
from jspec.jets import Jet


def rand_seq(rng, n, scale=1.0):
    return list(scale * (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)))


class TestConventions:
    def test_empty(self):
        assert f_eval([]) == 1.0
        assert f_eval_bruteforce([]) == 1.0

    def test_singleton(self):
        for a in (0.0, 3.5, -2.0 + 1.0j):
            assert f_eval([a]) == 1.0

    def test_pair(self):
        x1, x2 = 0.3 + 0.1j, -1.2 + 0.4j
        assert f_eval([x1, x2]) == pytest.approx(1.0 - x1 * x2)

    def test_triple_hand_value(self):
        assert f_eval([1.0, 2.0, 3.0]) == pytest.approx(1.0 - (1 * 2 + 2 * 3))


class TestBruteForceOracle:
    def test_matches_recurrence_random(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            xs = rand_seq(rng, int(rng.integers(0, 13)), scale=2.0)
            a, b = f_eval(xs), f_eval_bruteforce(xs)
            assert abs(a - b) <= 1e-12 * (1.0 + abs(a))

    def test_too_long(self):
        with pytest.raises(TooLong):
            f_eval_bruteforce([0.1] * 33)


class TestIdentities:
    def test_splitting_every_index(self):
        rng = np.random.default_rng(1)
        xs = rand_seq(rng, 10)
        full = f_eval(xs)
        for k in range(1, len(xs)):
            split = (f_eval(xs[:k]) * f_eval(xs[k:])
                     - xs[k - 1] * xs[k] * f_eval(xs[:k - 1]) * f_eval(xs[k + 1:]))
            assert abs(full - split) <= 1e-12 * (1.0 + abs(full))

    def test_three_term(self):
        rng = np.random.default_rng(2)
        xs = rand_seq(rng, 9)
        full = f_eval(xs)
        three = f_eval(xs[1:]) - xs[0] * xs[1] * f_eval(xs[2:])
        assert abs(full - three) <= 1e-12 * (1.0 + abs(full))

    def test_exponential_bound(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            xs = rand_seq(rng, int(rng.integers(2, 12)))
            assert abs(f_eval(xs)) <= math.exp(pair_sum(xs)) + 1e-12

    @given(st.lists(st.complex_numbers(max_magnitude=1.5, allow_nan=False,
                                       allow_infinity=False), max_size=11))
    @settings(max_examples=120, deadline=None)
    def test_oracle_equivalence_property(self, xs):
        a, b = f_eval(xs), f_eval_bruteforce(xs)
        assert abs(a - b) <= 1e-11 * (1.0 + abs(a))


class TestTailBound:
    def test_zero_tail(self):
        assert tail_bound(1.0, 0.0) == 0.0
        assert tail_bound(0.0, 0.0) == 0.0

    def test_hand_value(self):
        assert tail_bound(1.0, 0.01) == pytest.approx(
            math.e * (math.exp(0.01) - 1.0), rel=1e-12)

    def test_rejects_negative(self):
        with pytest.raises(NegativeInput):
            tail_bound(-1.0, 0.0)
        with pytest.raises(NegativeInput):
            tail_bound(1.0, 2.0)

    def test_bounds_actual_truncation(self):
        rng = np.random.default_rng(4)
        xs = rand_seq(rng, 12, scale=0.8)
        full, part = f_eval(xs), f_eval(xs[:8])
        s_total = pair_sum(xs)
        s_tail = sum(abs(xs[k] * xs[k + 1]) for k in range(7, 11))
        assert abs(full - part) <= tail_bound(s_total, s_tail) + 1e-14


class TestJetLift:
    def test_order_zero_degenerates(self):
        rng = np.random.default_rng(5)
        lam = rng.uniform(-1, 1, 8)
        g2 = rng.uniform(0.2, 1.0, 8)
        z0 = 2.0 + 0.5j
        jets = jet_lift(z0, 0, g2, lam)
        plain = f_eval([g / (z0 - l) for g, l in zip(g2, lam)])
        assert complex(f_eval(jets).coeffs[0]) == pytest.approx(plain)

    def test_geometric_series_coeffs(self):
        jets = jet_lift(2.0, 2, [1.0], [1.0])
        np.testing.assert_allclose(jets[0].coeffs, [1.0, -1.0, 1.0], atol=1e-14)

    def test_pole_at_base(self):
        with pytest.raises(PoleAtBase):
            jet_lift(1.0, 1, [1.0], [1.0])

    def test_derivative_vs_finite_difference(self):
        rng = np.random.default_rng(6)
        lam = rng.uniform(-1, 1, 8) + 1j * rng.uniform(-1, 1, 8)
        g2 = rng.uniform(0.2, 1.0, 8) + 1j * rng.uniform(-0.2, 0.2, 8)
        z0 = 1.5 + 1.5j
        d_jet = f_eval(jet_lift(z0, 1, g2, lam)).derivative(1)
        h = 1e-6
        d_fd = (f_eval([g / (z0 + h - l) for g, l in zip(g2, lam)])
                - f_eval([g / (z0 - h - l) for g, l in zip(g2, lam)])) / (2 * h)
        assert abs(d_jet - d_fd) <= 1e-7 * (1.0 + abs(d_jet))

    def test_high_order_contains_low_order(self):
        g2, lam = [1.0, 1.0], [0.3, -0.4]
        j1 = f_eval(jet_lift(1.0 + 1.0j, 1, g2, lam))
        j3 = f_eval(jet_lift(1.0 + 1.0j, 3, g2, lam))
        assert j1.derivative(1) == pytest.approx(j3.derivative(1), rel=1e-14)


class TestJetArithmetic:
    def test_recurrence_runs_on_jets(self):
        xs = [Jet.variable(0.5 + 0.1j, 2) * c for c in (0.3, -0.7, 1.1, 0.2)]
        out = f_eval(xs)
        assert isinstance(out, Jet)
        assert out.coeffs.shape == (3,)
