"""Tests for zero location, winding counts, multiplicities, and spectra."""


import numpy as np
import pytest

from jspec import (Box, Disk, bessel_compact, finite_section_zeros,
                   linear_free, locate_zeros, multiplicity, q_geometric,
                   residual_norm, solution_f, spectrum, winding_count)
from jspec.errors import Inconsistent, OnContourZero, WindowTooSmall, ZeroVector


def poly_fn(zeros):
    """Evaluator protocol (vals, ders, errs) for prod (z - a)^m."""

    def fn(zs):
        zs = np.asarray(zs, dtype=np.complex128)
        vals = np.ones_like(zs)
        logd = np.zeros_like(zs)
        with np.errstate(divide="ignore", invalid="ignore"):
            for a, m in zeros:
                vals = vals * (zs - a) ** m
                logd = logd + m / (zs - a)
            ders = np.where(vals == 0, 0.0, vals * logd)
        return vals, ders, 1e-14 * (1.0 + np.abs(vals))

    return fn


class TestGeometry:
    def test_box_basics(self):
        b = Box(-1.0, 3.0, -0.5, 0.5)
        assert b.center == 1.0 + 0.0j
        assert b.diam == 4.0
        assert b.contains(2.9 + 0.4j)
        assert not b.contains(3.1)
        assert b.contains(3.1, margin=0.2)
        assert b.as_list() == [-1.0, 3.0, -0.5, 0.5]

    def test_quarters_cover(self):
        b = Box(0.0, 1.0, 0.0, 1.0)
        qs = b.quarters(0.6, 0.3)
        assert len(qs) == 4
        # areas add up and every quarter sits inside the parent
        area = sum((q.re_hi - q.re_lo) * (q.im_hi - q.im_lo) for q in qs)
        assert area == pytest.approx(1.0)
        for q in qs:
            assert b.contains(q.center)

    def test_expand(self):
        b = Box(0.0, 2.0, -1.0, 1.0).expand(2.0)
        assert (b.re_lo, b.re_hi) == (-1.0, 3.0)

    def test_disk(self):
        d = Disk(1.0 + 1.0j, 0.5)
        assert d.contains(1.2 + 1.1j)
        assert not d.contains(2.0)
        assert d.covers_box(Box(0.9, 1.1, 0.9, 1.1))
        assert d.intersects_box(Box(1.4, 2.0, 0.9, 1.1))
        assert not d.intersects_box(Box(2.0, 3.0, 2.0, 3.0))


class TestWinding:
    def test_counts_multiplicity(self):
        fn = poly_fn([(1.0, 2), (-0.5, 1)])
        assert winding_count(fn, Disk(1.0, 0.3)) == 2
        assert winding_count(fn, Disk(-0.5, 0.3)) == 1
        assert winding_count(fn, Disk(5.0, 0.3)) == 0

    def test_additivity_on_box(self):
        fn = poly_fn([(1.0, 2), (-0.5, 1)])
        assert winding_count(fn, Box(-1.0, 2.0, -1.0, 1.0)) == 3

    def test_on_contour_zero(self):
        fn = poly_fn([(1.0, 1)])
        with pytest.raises(OnContourZero):
            winding_count(fn, Disk(0.0, 1.0))


class TestLocateZeros:
    def test_finds_zeros_with_multiplicity(self):
        fn = poly_fn([(1.0 + 0.2j, 2), (-0.5, 1)])
        pts = locate_zeros(fn, Box(-2.0, 2.0, -1.0, 1.0), tol=1e-10)
        assert [p.multiplicity for p in pts] == [1, 2]
        assert abs(pts[0].z + 0.5) <= 1e-9
        assert abs(pts[1].z - (1.0 + 0.2j)) <= 1e-9

    def test_round_coordinate_zero(self):
        # a zero at a round coordinate sits exactly on naive bisection edges
        fn = poly_fn([(0.0, 1), (1.0, 1)])
        pts = locate_zeros(fn, Box(-0.5, 1.5, -0.5, 0.5), tol=1e-10)
        assert len(pts) == 2

    def test_exclusions(self):
        fn = poly_fn([(1.0, 1), (-1.0, 1)])
        pts = locate_zeros(fn, Box(-2.0, 2.0, -1.0, 1.0), tol=1e-10,
                           exclusions=(Disk(-1.0, 0.3),))
        assert len(pts) == 1
        assert abs(pts[0].z - 1.0) <= 1e-9

    def test_empty_region(self):
        fn = poly_fn([(5.0, 1)])
        assert locate_zeros(fn, Box(-1.0, 1.0, -1.0, 1.0), tol=1e-10) == []

    def test_diagnostics(self):
        fn = poly_fn([(0.3, 1)])
        diag = {}
        locate_zeros(fn, Box(-1.0, 1.0, -1.0, 1.0), tol=1e-10, diagnostics=diag)
        assert diag["subdivision_depth"] >= 1


class TestSpectrum:
    def test_qgeo_single_eigenvalue(self):
        sp = q_geometric(0.5, 0.8)
        rep = spectrum(sp, Box(0.4, 0.6, -0.05, 0.05), tol=1e-10)
        assert len(rep.eigenpoints) == 1
        p = rep.eigenpoints[0]
        assert abs(p.z - 0.5) <= 1e-8
        assert p.multiplicity == 1
        assert rep.unknown_points == []

    def test_origin_reported_unknown(self):
        # eigenvalues accumulate at 0; a box there must exclude a disk and
        # report the origin as unresolved rather than fabricate an answer
        sp = q_geometric(0.5, 0.8)
        rep = spectrum(sp, Box(-0.01, 0.01, -0.01, 0.01), tol=1e-8,
                       exclusion_radius=0.0095)
        assert rep.eigenpoints == []
        assert len(rep.unknown_points) == 1
        assert rep.excluded_zones

    def test_report_json_schema(self):
        sp = q_geometric(0.5, 0.8)
        doc = spectrum(sp, Box(0.4, 0.6, -0.05, 0.05), tol=1e-10).to_json()
        assert doc["region"] == [0.4, 0.6, -0.05, 0.05]
        (pt,) = doc["eigenpoints"]
        assert set(pt) == {"z", "multiplicity", "residual", "method"}
        assert set(pt["z"]) == {"re", "im"}
        assert "diagnostics" in doc


class TestMultiplicity:
    def test_simple_zero(self):
        sp = linear_free(1.0)
        rep = multiplicity(sp, 1.0, tol=1e-10)
        assert rep["nu_a"] == 1
        # the renormalized function is sin(pi z)/pi, whose derivative at an
        # integer N has modulus |cos(pi N)| = 1
        assert rep["derivative_profile"][1] == pytest.approx(1.0, abs=1e-7)

    def test_not_a_zero(self):
        sp = linear_free(1.0)
        with pytest.raises(Inconsistent):
            multiplicity(sp, 0.5, tol=1e-10)


class TestFiniteSection:
    def test_linear_sections_drift_to_integers(self):
        sp = linear_free(1.0)
        box = Box(0.55, 1.45, -0.2, 0.2)
        pts = finite_section_zeros(sp, 12, box)
        assert len(pts) == 1
        assert abs(pts[0].z - 1.0) <= 0.1
        assert "DIAGNOSTIC" in pts[0].method
        # larger sections approach the true eigenvalue
        far = abs(finite_section_zeros(sp, 8, box)[0].z - 1.0)
        near = abs(finite_section_zeros(sp, 16, box)[0].z - 1.0)
        assert near < far


class TestResidualNorm:
    def test_small_at_eigenvalue(self):
        sp = bessel_compact(0.3, 0.7)
        z = 1.0 / 1.3
        slc = solution_f(sp, z, (0, 12))
        assert residual_norm(sp, z, slc) <= 1e-8

    def test_detects_corruption(self):
        sp = bessel_compact(0.3, 0.7)
        slc = solution_f(sp, 0.45 + 0.35j, (0, 12))
        slc.values[6] *= 1.1
        assert residual_norm(sp, 0.45 + 0.35j, slc) > 1e-4

    def test_window_too_small(self):
        sp = bessel_compact(0.3, 0.7)
        slc = solution_f(sp, 0.45 + 0.35j, (0, 3))
        with pytest.raises(WindowTooSmall):
            residual_norm(sp, 0.45 + 0.35j, slc)

    def test_zero_vector(self):
        sp = bessel_compact(0.3, 0.7)
        slc = solution_f(sp, 0.45 + 0.35j, (0, 12))
        slc.values[:] = 0.0
        with pytest.raises(ZeroVector):
            residual_norm(sp, 0.45 + 0.35j, slc)
