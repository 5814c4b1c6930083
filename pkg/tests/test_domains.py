"""Kernel formulas, membership, ratios, and the Reinhardt series engine."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import bergman.domains as dom
from bergman.errors import (
    InadmissibleIndex,
    PointOutsideDomain,
    UndeclaredAsymptotics,
    UnsupportedKind,
)

ALL_DOMAINS = [dom.disc(), dom.ball(2), dom.polydisc(2), dom.polydisc(3),
               dom.upper_half_plane(), dom.punctured_disc(), dom.hartogs_triangle()]


class TestKernelValues:
    def test_disc_at_origin(self):
        assert dom.kernel(dom.disc(), 0j, 0j) == pytest.approx(1 / math.pi)

    def test_hartogs_axis_formula(self):
        # K((eps,0),(delta,0)) = eps*delta / (pi^2 (eps delta)^2 (1 - eps delta)^2)
        h = dom.hartogs_triangle()
        for delta, eps in [(0.5, 0.25), (0.7, 1e-3), (0.3, 0.29)]:
            got = dom.kernel(h, (eps, 0.0), (delta, 0.0))
            x = eps * delta
            assert got.real == pytest.approx(x / (math.pi ** 2 * x ** 2 * (1 - x) ** 2), rel=1e-13)
            assert got.imag == pytest.approx(0.0, abs=1e-18)

    def test_hartogs_diagonal_value(self):
        got = dom.kernel(dom.hartogs_triangle(), (0.5, 0.0), (0.5, 0.0))
        assert got.real == pytest.approx(1 / (math.pi ** 2 * 0.25 * 0.75 ** 2), rel=1e-14)

    def test_half_plane_diagonal_positive(self):
        got = dom.kernel(dom.upper_half_plane(), 1j, 1j)
        assert got.real == pytest.approx(1 / (4 * math.pi), rel=1e-14)

    def test_punctured_disc_equals_disc(self):
        z, w = 0.3 + 0.1j, -0.2 + 0.5j
        assert dom.kernel(dom.punctured_disc(), z, w) == dom.kernel(dom.disc(), z, w)

    def test_polydisc_factorizes(self):
        d2 = dom.polydisc(2)
        rng = np.random.default_rng(1)
        for _ in range(50):
            z = tuple(0.9 * math.sqrt(rng.random()) * cmath.exp(2j * math.pi * rng.random())
                      for _ in range(2))
            w = tuple(0.9 * math.sqrt(rng.random()) * cmath.exp(2j * math.pi * rng.random())
                      for _ in range(2))
            prod = (dom.kernel(dom.disc(), z[0], w[0]) * dom.kernel(dom.disc(), z[1], w[1]))
            got = dom.kernel(d2, z, w)
            assert abs(got - prod) <= 1e-14 * abs(got)

    def test_reinhardt_kind_routed_elsewhere(self):
        rd = dom.reinhardt(dom.disc_profile())
        with pytest.raises(UnsupportedKind):
            dom.kernel(rd, 0j, 0j)

    @pytest.mark.parametrize("domain", ALL_DOMAINS, ids=str)
    def test_hermitian_symmetry_and_positive_diagonal(self, domain):
        pts = dom.sample_interior(domain, 100, seed=hash(domain.kind) % 1000)
        for i in range(0, 100, 2):
            z, w = pts[i], pts[i + 1]
            kzw = dom.kernel(domain, z, w)
            kwz = dom.kernel(domain, w, z)
            assert abs(kzw - kwz.conjugate()) <= 1e-12 * abs(kzw)
            assert dom.kernel_diag(domain, z) > 0


class TestMembership:
    def test_boundary_rejected(self):
        with pytest.raises(PointOutsideDomain):
            dom.kernel(dom.disc(), 1.0 + 0j, 0j)
        with pytest.raises(PointOutsideDomain):
            dom.kernel(dom.hartogs_triangle(), (0.5, 0.5), (0.3, 0.0))
        with pytest.raises(PointOutsideDomain):
            dom.kernel(dom.upper_half_plane(), 1.0 + 0j, 2j)

    def test_margin_is_relative_on_the_hartogs_edge(self):
        # deep but edge-separated points stay members
        assert dom.contains(dom.hartogs_triangle(), (1e-40, 0.5e-40))
        assert not dom.contains(dom.hartogs_triangle(), (1e-40, 1e-40))

    def test_punctured_disc_omits_origin(self):
        assert not dom.contains(dom.punctured_disc(), 0j)
        assert dom.contains(dom.disc(), 0j)

    @pytest.mark.parametrize("domain", ALL_DOMAINS, ids=str)
    def test_sampler_stays_inside(self, domain):
        for z in dom.sample_interior(domain, 30, seed=7):
            assert dom.contains(domain, z)


class TestVolumes:
    @pytest.mark.parametrize("domain,expected", [
        (dom.disc(), math.pi),
        (dom.polydisc(2), math.pi ** 2),
        (dom.ball(2), math.pi ** 2 / 2),
        (dom.hartogs_triangle(), math.pi ** 2 / 2),
        (dom.upper_half_plane(), math.inf),
    ], ids=str)
    def test_volume(self, domain, expected):
        assert dom.volume(domain) == pytest.approx(expected)


class TestKernelRatio:
    def test_disc_center_is_one(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            w = 0.95 * math.sqrt(rng.random()) * cmath.exp(2j * math.pi * rng.random())
            assert dom.kernel_ratio(dom.disc(), 0j, w) == pytest.approx(1.0)

    def test_hartogs_axis_ratio_formula(self):
        h = dom.hartogs_triangle()
        for delta in (0.3, 0.5, 0.9):
            for eps in (0.5, 1e-2, 1e-4):
                got = dom.kernel_ratio(h, (delta, 0.0), (eps, 0.0))
                want = delta * (1 - delta ** 2) ** 2 / (eps * (1 - delta * eps) ** 2)
                assert got == pytest.approx(want, rel=1e-12)

    def test_disc_boundary_limit(self):
        # sup over w at |z| = 0.9 approaches (1 + 0.9)^2; grid search oracle
        z = 0.9 + 0j
        best = max(dom.kernel_ratio(dom.disc(), z, r * cmath.exp(1j * t))
                   for r in np.linspace(0.9, 1 - 1e-9, 50)
                   for t in np.linspace(-0.02, 0.02, 21))
        assert best == pytest.approx((1 + 0.9) ** 2, rel=1e-4)

    def test_disc_ratio_bound_and_near_sup(self):
        rng = np.random.default_rng(5)
        sup = 0.0
        for _ in range(400):
            z = (1 - 10 ** rng.uniform(-6, -0.3)) * cmath.exp(2j * math.pi * rng.random())
            w = (1 - 10 ** rng.uniform(-9, -0.3)) * cmath.exp(1j * (cmath.phase(z) + rng.normal() * 1e-4))
            r = dom.kernel_ratio(dom.disc(), z, w)
            assert r <= 4.0 + 1e-12
            sup = max(sup, r)
        assert sup > 3.9

    def test_half_plane_ratio_formula_and_bound(self):
        hp = dom.upper_half_plane()
        rng = np.random.default_rng(8)
        for _ in range(60):
            z = complex(rng.uniform(-3, 3), 10 ** rng.uniform(-2, 2))
            w = complex(rng.uniform(-3, 3), 10 ** rng.uniform(-2, 2))
            got = dom.kernel_ratio(hp, z, w)
            want = 4 * z.imag ** 2 / abs(z - w.conjugate()) ** 2
            assert got == pytest.approx(want, rel=1e-12)
            assert got <= 4.0 + 1e-12

    def test_ratio_decays_toward_boundary(self):
        # with w fixed, K(z,z) blows up as z nears the boundary, so the ratio sinks to 0
        w = 0.2 + 0.1j
        ratios = [dom.kernel_ratio(dom.disc(), (1 - 10.0 ** -k) + 0j, w)
                  for k in range(1, 9)]
        assert all(a > b for a, b in zip(ratios, ratios[1:]))
        assert ratios[-1] < 1e-6

    @given(st.complex_numbers(max_magnitude=0.95, allow_nan=False, allow_infinity=False),
           st.complex_numbers(max_magnitude=0.95, allow_nan=False, allow_infinity=False))
    @settings(max_examples=200, deadline=None)
    def test_disc_ratio_never_exceeds_square_bound(self, z, w):
        ratio = dom.kernel_ratio(dom.disc(), z, w)
        assert ratio <= (1 + abs(z)) ** 2 * (1 + 1e-10)


class TestNormalizedKernel:
    def test_disc_center_is_constant(self):
        k = dom.normalized_kernel(dom.disc(), 0j)
        assert k(0.5 + 0.2j) == pytest.approx(1 / math.sqrt(math.pi))

    def test_vectorized_matches_pointwise(self):
        k = dom.normalized_kernel(dom.hartogs_triangle(), (0.5, 0.2))
        pts = np.array([[0.4 + 0.1j, 0.1 + 0.05j], [0.6, 0.3]], dtype=complex)
        vec = k(pts)
        assert vec[0] == pytest.approx(k((0.4 + 0.1j, 0.1 + 0.05j)))
        assert vec[1] == pytest.approx(k((0.6 + 0j, 0.3 + 0j)))


class TestMonomialNorms:
    def test_disc_monomials(self):
        for n in range(6):
            got = dom.monomial_l2_norm2(dom.disc_profile(), (n,))
            assert got == pytest.approx(math.pi / (n + 1), rel=1e-10)

    def test_hartogs_closed_form(self):
        prof = dom.hartogs_profile()
        for n, m in [(1, 0), (0, 0), (-1, 0), (2, 1), (-3, 4)]:
            got = dom.monomial_l2_norm2(prof, (n, m))
            assert got == pytest.approx(math.pi ** 2 / ((m + 1) * (n + m + 2)), rel=1e-9)

    def test_hartogs_inadmissible(self):
        prof = dom.hartogs_profile()
        assert math.isinf(dom.monomial_l2_norm2(prof, (-2, 0)))
        assert math.isinf(dom.monomial_l2_norm2(prof, (0, -1)))

    @pytest.mark.parametrize("j,k", [(j, k) for j in range(5) for k in range(5)])
    def test_boas_classifier(self, j, k):
        finite = math.isfinite(dom.monomial_l2_norm2(dom.boas_profile(), (j, k)))
        assert finite == (j < k)

    def test_boas_negative_exponent_rejected(self):
        assert math.isinf(dom.monomial_l2_norm2(dom.boas_profile(), (-1, 3)))

    def test_undeclared_asymptotics(self):
        bad = dom.ReinhardtProfile(name="bad", dim=2, r1_max=math.inf,
                                   bound=lambda r: 1.0 / (1.0 + r),
                                   exponent_at_zero=0.0, exponent_at_inf=None)
        with pytest.raises(UndeclaredAsymptotics):
            dom.monomial_l2_norm2(bad, (0, 1))

    def test_profile_probe_catches_wrong_exponent(self):
        with pytest.raises(UndeclaredAsymptotics):
            dom.validate_profile(dom.ReinhardtProfile(
                name="wrong", dim=2, r1_max=math.inf,
                bound=lambda r: 1.0 / (1.0 + r),
                exponent_at_zero=0.0, exponent_at_inf=-2.0))


class TestReinhardtKernel:
    def test_boas_vanishes_at_origin(self):
        got = dom.reinhardt_kernel(dom.boas_profile(), (0j, 0j), (0j, 0j), truncation=12)
        assert got.value == 0

    def test_disc_profile_at_origin(self):
        got = dom.reinhardt_kernel(dom.disc_profile(), 0j, 0j, truncation=12)
        assert got.value.real == pytest.approx(1 / math.pi, rel=1e-12)

    def test_hartogs_series_matches_closed_form(self):
        got = dom.reinhardt_kernel(dom.hartogs_profile(), (0.5, 0.2), (0.5, 0.2),
                                   truncation=80)
        want = dom.kernel(dom.hartogs_triangle(), (0.5, 0.2), (0.5, 0.2))
        assert abs(got.value - want) <= 1e-8 * abs(want)
        assert not got.capped

    def test_point_outside_profile(self):
        with pytest.raises(PointOutsideDomain):
            dom.reinhardt_kernel(dom.hartogs_profile(), (0.2, 0.5), (0.2, 0.1))
