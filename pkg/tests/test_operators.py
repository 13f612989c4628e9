"""Tests for operator specifications, pole bookkeeping, and diagnostics."""

import json
import math

import numpy as np
import pytest

from jspec import (RegClass, bessel_compact, custom_operator, linear_free,
                   load_spec, p_factor, pole_book, pole_indices, q_geometric,
                   spec_from_json, summability_report)
from jspec.errors import (AmbiguousMatch, ConfigError, NoTailBound, PoleHit)


ALL_SPECS = [
    ("bessel", lambda: bessel_compact(0.3, 0.7)),
    ("linear", lambda: linear_free(1.0)),
    ("qgeo", lambda: q_geometric(0.5, 0.8)),
]


@pytest.fixture(params=ALL_SPECS, ids=[n for n, _ in ALL_SPECS])
def spec(request):
    return request.param[1]()


class TestGammaSquared:
    def test_base_value(self, spec):
        assert spec.gamma_sq(0) == 1.0 + 0.0j

    def test_pairing_invariant(self, spec):
        # gamma_n^2 gamma_{n+1}^2 = w_n^2 on both sides of the origin
        for n in range(-15, 15):
            prod = spec.gamma_sq(n) * spec.gamma_sq(n + 1)
            wn2 = spec.w(n) ** 2
            assert abs(prod - wn2) <= 1e-12 * (1.0 + abs(wn2))

    def test_array_matches_scalar(self, spec):
        arr = spec.gamma.array(-8, 8)
        for i, n in enumerate(range(-8, 9)):
            assert arr[i] == spec.gamma_sq(n)

    def test_perturbation_enters_gamma(self):
        base = linear_free(1.0)
        pert = linear_free(1.0, perturbation={3: (None, 2.0)})
        assert pert.gamma_sq(4) == pytest.approx(4.0 * base.gamma_sq(4))
        assert pert.gamma_sq(3) == base.gamma_sq(3)


class TestSequences:
    def test_arrays_match_scalars(self, spec):
        ks = np.arange(-12, 13)
        np.testing.assert_allclose(spec.lam_array(ks),
                                   [spec.lam(int(k)) for k in ks], rtol=1e-14)
        np.testing.assert_allclose(spec.w_array(ks),
                                   [spec.w(int(k)) for k in ks], rtol=1e-14)

    def test_perturbation_overrides(self):
        sp = bessel_compact(0.3, 0.7, perturbation={2: (5.0, None), -1: (None, 0.25)})
        assert sp.lam(2) == 5.0
        assert sp.w(2) == bessel_compact(0.3, 0.7).w(2)
        assert sp.w(-1) == 0.25
        ks = np.arange(-3, 4)
        assert sp.lam_array(ks)[ks.tolist().index(2)] == 5.0
        assert sp.w_array(ks)[ks.tolist().index(-1)] == 0.25

    def test_zero_w_override_rejected(self):
        with pytest.raises(ConfigError):
            linear_free(1.0, perturbation={0: (None, 0.0)})


class TestFamilyValidation:
    def test_integer_alpha_rejected(self):
        with pytest.raises(ConfigError):
            bessel_compact(2.0, 0.7)

    def test_zero_beta_rejected(self):
        with pytest.raises(ConfigError):
            bessel_compact(0.3, 0.0)
        with pytest.raises(ConfigError):
            q_geometric(0.5, 0.0)

    def test_bad_q_rejected(self):
        for q in (0.0, 1.0, 1.5):
            with pytest.raises(ConfigError):
                q_geometric(q, 0.8)

    def test_zero_w_rejected(self):
        with pytest.raises(ConfigError):
            linear_free(0.0)

    def test_bad_reg_class(self):
        with pytest.raises(ConfigError):
            RegClass("frobnicate")
        with pytest.raises(ConfigError):
            RegClass("compact", p=0)


class TestPFactor:
    def test_base(self, spec):
        assert p_factor(spec, 0, 1.234 + 0.5j) == 1.0

    def test_hand_value(self):
        sp = linear_free(1.0)
        # P_2(0.5) = w_0 w_1 / ((0.5 - 1)(0.5 - 2)) = 1 / 0.75
        assert p_factor(sp, 2, 0.5) == pytest.approx(4.0 / 3.0)

    def test_recurrence_both_sides(self, spec):
        z = 2.3 + 0.7j
        for n in range(0, 6):
            lhs = p_factor(spec, n + 1, z)
            rhs = p_factor(spec, n, z) * spec.w(n) / (z - spec.lam(n + 1))
            assert abs(lhs - rhs) <= 1e-12 * (1.0 + abs(lhs))
        for n in range(0, -6, -1):
            lhs = p_factor(spec, n - 1, z)
            rhs = p_factor(spec, n, z) * (z - spec.lam(n)) / spec.w(n - 1)
            assert abs(lhs - rhs) <= 1e-12 * (1.0 + abs(lhs))

    def test_pole_hit(self):
        sp = linear_free(1.0)
        with pytest.raises(PoleHit):
            p_factor(sp, 3, 2.0)

    def test_skip_poles(self):
        sp = linear_free(1.0)
        # omit the (z - lambda_2) factor; remaining product is finite at z = 2
        val = p_factor(sp, 3, 2.0, skip_poles=(2,))
        assert val == pytest.approx(1.0 / ((2.0 - 1.0) * (2.0 - 3.0)))


class TestPoleBook:
    def test_bessel(self):
        sp = bessel_compact(0.3, 0.7)
        book = pole_book(sp, 1.0 / 2.3)
        assert book.indices == (2,)
        assert (book.r_plus, book.r_minus, book.r) == (1, 0, 1)
        book = pole_book(sp, 1.0 / 0.3)
        assert book.indices == (0,)
        assert (book.r_plus, book.r_minus) == (0, 1)

    def test_linear(self):
        sp = linear_free(1.0)
        assert pole_indices(sp, -3.0) == (-3,)
        assert pole_indices(sp, 0.5) == ()

    def test_qgeo(self):
        sp = q_geometric(0.5, 0.8)
        assert pole_indices(sp, 0.25) == (2,)
        assert pole_indices(sp, 4.0) == (-2,)
        assert pole_indices(sp, 0.3) == ()

    def test_perturbed_index_found(self):
        sp = linear_free(1.0, perturbation={7: (0.5, None)})
        assert pole_indices(sp, 0.5) == (7,)

    def test_custom_needs_window(self):
        sp = custom_operator(lambda n: complex(n), lambda n: 1.0)
        with pytest.raises(NoTailBound):
            pole_indices(sp, 2.0)
        assert pole_indices(sp, 2.0, window=5) == (2,)

    def test_ambiguous_match(self):
        eps = 1e-13

        def lam(n):
            if n == 1:
                return 0.5
            if n == 2:
                return 0.5 + eps
            return complex(n + 10)

        sp = custom_operator(lam, lambda n: 1.0)
        with pytest.raises(AmbiguousMatch):
            pole_indices(sp, 0.5, window=5)


class TestJsonConfig:
    def test_round_trip(self, spec):
        doc = spec.to_json()
        sp2 = spec_from_json(json.loads(json.dumps(doc)))
        ks = np.arange(-6, 7)
        np.testing.assert_allclose(sp2.lam_array(ks), spec.lam_array(ks), rtol=1e-14)
        np.testing.assert_allclose(sp2.w_array(ks), spec.w_array(ks), rtol=1e-14)

    def test_perturbation_round_trip(self):
        sp = bessel_compact(0.3, 0.7, perturbation={2: (5.0 + 1.0j, None),
                                                    -1: (None, 0.25)})
        sp2 = spec_from_json(sp.to_json())
        assert sp2.lam(2) == 5.0 + 1.0j
        assert sp2.w(-1) == 0.25
        assert sp2.w(2) == sp.family.w(2)

    def test_explicit_document(self):
        doc = {"family": "bessel_compact",
               "alpha": {"re": 0.3, "im": 0.0},
               "beta": {"re": 0.7, "im": 0.1},
               "perturbation": [{"n": 1, "lambda": {"re": 2.0, "im": 0.0}}]}
        sp = spec_from_json(doc)
        assert sp.lam(1) == 2.0
        assert sp.lam(3) == pytest.approx(1.0 / (3 + 0.3))

    def test_bad_documents(self):
        bad = [
            "not a dict",
            {},
            {"family": "unknown_thing"},
            {"family": "linear_free", "w": {"im": 1.0}},
            {"family": "linear_free", "w": {"re": 1.0},
             "perturbation": [{"lambda": {"re": 0.0}}]},
        ]
        for doc in bad:
            with pytest.raises(ConfigError):
                spec_from_json(doc)

    def test_load_spec(self, tmp_path):
        path = tmp_path / "op.json"
        path.write_text(json.dumps(linear_free(0.5).to_json()))
        assert load_spec(path).w(0) == 0.5
        with pytest.raises(ConfigError):
            load_spec(tmp_path / "missing.json")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ConfigError):
            load_spec(bad)


class TestSummability:
    def test_geometric_convergent(self):
        rep = summability_report(q_geometric(0.5, 0.8), 0.3)
        assert rep.verdict == "CONVERGENT"
        assert rep.tail_bounds[-1] < 1e-6
        # partial sums are nondecreasing and consistent with the tail bounds
        assert all(b <= a + t + 1e-12 for a, b, t in
                   zip(rep.partial_sums, rep.partial_sums[1:], rep.tail_bounds))

    def test_custom_inconclusive(self):
        sp = custom_operator(lambda n: complex(n), lambda n: 1.0)
        rep = summability_report(sp, 0.5 + 0.5j)
        assert rep.verdict == "INCONCLUSIVE"
        assert all(math.isinf(t) for t in rep.tail_bounds)

    def test_pole_hit(self):
        with pytest.raises(PoleHit):
            summability_report(linear_free(1.0), 3.0)

    def test_perturbation_spoils_small_windows(self):
        sp = q_geometric(0.5, 0.8, perturbation={40: (None, 2.0)})
        rep = summability_report(sp, 0.3, windows=(16, 32))
        assert all(math.isinf(t) for t in rep.tail_bounds)
