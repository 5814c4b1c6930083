"""Basis coefficients, blow-up symbol machinery, blow-up table, weak pairing."""

import math

import numpy as np
import pytest

import bergman.domains as dom
from bergman import hartogs as ht
from bergman import quadrature as quad
from bergman.errors import (
    EpsilonOutOfRange,
    InadmissibleIndex,
    TruncationInsufficient,
)


@pytest.fixture(scope="module")
def h_rule():
    return quad.build_rule(dom.hartogs_triangle(), 16, 24)


class TestCoefficients:
    def test_values(self):
        assert ht.basis_coefficient(0, 0) == pytest.approx(2 / math.pi ** 2)
        assert ht.basis_coefficient(-1, 0) == pytest.approx(1 / math.pi ** 2)
        assert ht.basis_coefficient(1, 0) == pytest.approx(3 / math.pi ** 2)

    def test_inadmissible(self):
        with pytest.raises(InadmissibleIndex):
            ht.basis_coefficient(-2, 0)
        with pytest.raises(InadmissibleIndex):
            ht.basis_coefficient(0, -1)

    @pytest.mark.parametrize("n,m", [(-1, 0), (0, 0), (2, 1)])
    def test_reciprocal_matches_quadrature_norm(self, n, m):
        norm2 = dom.monomial_l2_norm2(dom.hartogs_profile(), (n, m))
        assert 1.0 / ht.basis_coefficient(n, m) == pytest.approx(norm2, rel=1e-6)

    def test_basis_orthogonality(self, h_rule):
        # distinct admissible monomials are orthogonal over the triangle
        idx = [(n, m) for m in range(0, 3) for n in range(-m - 1, 4)]
        vals = {a: h_rule.nodes[:, 0] ** a[0] * h_rule.nodes[:, 1] ** a[1] for a in idx}
        for i, a in enumerate(idx):
            for b in idx[i + 1:]:
                ip = np.sum(h_rule.weights * vals[a] * np.conj(vals[b]))
                na = math.sqrt(dom.monomial_l2_norm2(dom.hartogs_profile(), a))
                nb = math.sqrt(dom.monomial_l2_norm2(dom.hartogs_profile(), b))
                assert abs(ip) <= 1e-8 * na * nb

    def test_basis_ordering(self):
        # ordered by k = n + m + 1, then m; both capped at the truncation
        idx = ht.basis_indices(2)
        assert idx[:6] == [(-1, 0), (-2, 1), (-3, 2), (0, 0), (-1, 1), (-2, 2)]
        ks = [n + m + 1 for n, m in idx]
        assert ks == sorted(ks)

    def test_kernel_series_box(self):
        domain = dom.hartogs_triangle()
        rng = np.random.default_rng(6)
        for _ in range(10):
            z1 = rng.uniform(0.2, 0.8) * np.exp(2j * np.pi * rng.random())
            w1 = rng.uniform(0.2, 0.8) * np.exp(2j * np.pi * rng.random())
            z = (z1, z1 * rng.uniform(0, 0.8) * np.exp(2j * np.pi * rng.random()))
            w = (w1, w1 * rng.uniform(0, 0.8) * np.exp(2j * np.pi * rng.random()))
            want = dom.kernel(domain, w, z)
            got = ht.kernel_series(w, z, truncation=90)
            assert abs(got - want) <= 1e-8 * abs(want)


class TestFeps:
    def test_norm_closed_form(self):
        assert ht.blowup_symbol_norm(0.5) ** 2 == pytest.approx(math.pi ** 2)
        assert ht.blowup_symbol_norm(1.0) ** 2 == pytest.approx(math.pi ** 2 / 2)

    def test_norm_by_quadrature(self):
        rule = quad.build_rule(dom.hartogs_triangle(), 48, 4, origin_grading=12.0)
        got = quad.integrate(rule, ht.blowup_symbol_values(0.1, rule.nodes) ** 2).real
        assert got == pytest.approx(49.348022005446786, rel=5e-3)

    def test_out_of_range(self):
        with pytest.raises(EpsilonOutOfRange):
            ht.blowup_symbol(0.0, (0.5, 0.1))
        with pytest.raises(EpsilonOutOfRange):
            ht.blowup_symbol(-0.3, (0.5, 0.1))
        with pytest.raises(EpsilonOutOfRange):
            ht.blowup_symbol_norm(1.5)

    def test_pointwise_value(self):
        assert ht.blowup_symbol(1.0, (0.5, 0.1)) == pytest.approx(1.0)
        assert ht.blowup_symbol(0.5, (0.5, 0.0)) == pytest.approx(2.0)


class TestClosedFormTransform:
    def test_independent_of_second_coordinate(self):
        a = ht.berezin_blowup_closed(0.07, (0.5, 0.2))
        b = ht.berezin_blowup_closed(0.07, (0.5, 0.1))
        c = ht.berezin_blowup_closed(0.07, (0.5, 0.45j))
        assert a == b == c

    def test_matches_direct_quadrature(self):
        for eps in (0.1, 0.01):
            for z in ((0.3, 0.1), (0.62, 0.3)):
                closed = ht.berezin_blowup_closed(eps, z)
                direct = ht.berezin_blowup_by_quadrature(eps, z)
                assert direct == pytest.approx(closed, rel=1e-4)

    def test_small_eps_scaling(self):
        # the leading 1/eps term dominates: value(1e-4) / value(1e-3) in [9, 11]
        z = (0.3, 0.1)
        ratio = ht.berezin_blowup_closed(1e-4, z) / ht.berezin_blowup_closed(1e-3, z)
        assert 9.0 <= ratio <= 11.0

    def test_refuses_outer_edge(self):
        with pytest.raises(TruncationInsufficient):
            ht.berezin_blowup_closed(0.1, (0.9995, 0.1))

    def test_insufficient_truncation(self):
        with pytest.raises(TruncationInsufficient):
            ht.berezin_blowup_closed(0.1, (0.9, 0.1), truncation=10)


class TestIdentity:
    def test_axis_point(self):
        assert ht.diagonal_identity_check((0.5, 0.0))
        lhs = 1.0 / (math.pi ** 2 * 0.25 * dom.kernel_diag(dom.hartogs_triangle(), (0.5, 0.0)))
        assert lhs == pytest.approx(0.5625, rel=1e-12)

    def test_near_edge_degeneracy(self):
        assert ht.diagonal_identity_check((0.5, 0.49999))

    def test_random_points(self):
        for z in dom.sample_interior(dom.hartogs_triangle(), 100, seed=44):
            assert ht.diagonal_identity_check(z)


class TestBlowup:
    def test_bulge_constant_against_quadrature(self, h_rule):
        sq = quad.integrate(h_rule, (1 - np.abs(h_rule.nodes[:, 0]) ** 2) ** 4).real
        assert ht.NORM_BULGE ** 2 == pytest.approx(sq, rel=1e-9)
        assert ht.NORM_BULGE ** 2 == pytest.approx(math.pi ** 2 / 30)

    def test_lower_bound_row(self):
        table = ht.blowup_table([0.01])
        row = table.rows[0]
        assert row.ratio_lower == pytest.approx(1 / math.sqrt(0.15), rel=1e-12)
        assert row.norm_f == pytest.approx(math.pi / math.sqrt(0.02), rel=1e-12)

    def test_rows_beat_bound_and_grow(self):
        table = ht.blowup_table([1e-1, 1e-2, 1e-3, 1e-4])
        for row in table.rows:
            assert row.ratio_quadrature >= row.ratio_lower * 0.99
        ratios = [r.ratio_quadrature for r in table.rows]
        assert all(a < b for a, b in zip(ratios, ratios[1:]))
        assert -0.55 <= table.slope <= -0.45

    def test_csv_header_and_shape(self):
        table = ht.blowup_table([0.5, 0.25])
        text = table.to_csv()
        lines = text.strip().split("\n")
        assert lines[0] == "eps,norm_f,lower_bound_Bf,ratio_lower,ratio_quadrature"
        assert len(lines) == 3
        assert all(len(line.split(",")) == 5 for line in lines[1:])

    def test_eps_validation(self):
        with pytest.raises(EpsilonOutOfRange):
            ht.blowup_table([1.0])


class TestWeakPairing:
    def test_closed_values(self):
        assert ht.weak_pairing(2) == pytest.approx(3 * math.pi / 4, abs=1e-12)
        for j in range(2, 11):
            assert ht.weak_pairing(j) == pytest.approx(math.pi * (1 - j ** -2), abs=1e-10)

    def test_limit(self):
        assert abs(ht.weak_pairing(1000) - math.pi) <= 1e-5 * math.pi

    def test_quadrature_agreement(self, h_rule):
        got = ht.weak_pairing_by_quadrature(3, h_rule)
        assert got == pytest.approx(math.pi * (1 - 1 / 9), rel=1e-4)
