"""Rule construction, graded integration, tail classification, serialization."""

import math
import os

import numpy as np
import pytest

import bergman.domains as dom
from bergman import quadrature as quad
from bergman.errors import (
    BorderlineExponent,
    InvalidResolution,
    NonFiniteValue,
)


class TestRuleWeights:
    def test_disc_weight_sum(self):
        rule = quad.build_rule(dom.disc(), 64, 64, grading=2.0)
        assert abs(rule.weights.sum() - math.pi) <= 1e-10
        assert np.all(rule.weights > 0)

    def test_bidisc_weight_sum(self):
        rule = quad.build_rule(dom.polydisc(2), 32, 32)
        assert abs(rule.weights.sum() - math.pi ** 2) <= 1e-8

    def test_hartogs_weight_sum(self):
        rule = quad.build_rule(dom.hartogs_triangle(), 16, 32)
        assert abs(rule.weights.sum() - math.pi ** 2 / 2) <= 1e-9

    def test_ball_weight_sum(self):
        rule = quad.build_rule(dom.ball(2), 16, 16)
        assert abs(rule.weights.sum() - math.pi ** 2 / 2) <= 1e-10

    @pytest.mark.parametrize("domain", [dom.disc(), dom.hartogs_triangle(),
                                        dom.ball(2), dom.polydisc(2)], ids=str)
    def test_nodes_strictly_inside(self, domain):
        rule = quad.build_rule(domain, 8, 8)
        step = max(1, len(rule) // 200)
        for row in rule.nodes[::step]:
            assert dom.contains(domain, tuple(row))

    def test_invalid_resolution(self):
        with pytest.raises(InvalidResolution):
            quad.build_rule(dom.disc(), 3, 16)
        with pytest.raises(InvalidResolution):
            quad.build_rule(dom.disc(), 16, 16, grading=0.5)


class TestIntegrate:
    def test_disc_constant(self):
        rule = quad.build_rule(dom.disc(), 24, 24)
        got = quad.integrate(rule, lambda w: np.ones(len(w)))
        assert got.real == pytest.approx(math.pi, rel=1e-12)

    def test_hartogs_blowup_symbol_squared_mild(self):
        # int |w1|^(2(-2 + 2 eps)) dV = pi^2 / (2 eps) at eps = 0.1, default grading
        rule = quad.build_rule(dom.hartogs_triangle(), 24, 8)
        eps = 0.1
        got = quad.integrate(rule, lambda w: np.abs(w[:, 0]) ** (4 * eps - 4.0))
        assert got.real == pytest.approx(math.pi ** 2 / (2 * eps), rel=5e-3)

    def test_hartogs_bulge_moment(self):
        # int (1 - |z1|^2)^4 dV = pi^2 B(2,5) = pi^2/30
        rule = quad.build_rule(dom.hartogs_triangle(), 24, 8)
        got = quad.integrate(rule, lambda w: (1 - np.abs(w[:, 0]) ** 2) ** 4)
        assert got.real == pytest.approx(math.pi ** 2 / 30, rel=1e-10, abs=1e-4)

    def test_singularity_robustness_with_origin_grading(self):
        rule = quad.build_rule(dom.hartogs_triangle(), 64, 4, origin_grading=15.0)
        for eps in (0.5, 0.1, 0.02):
            got = quad.integrate(rule, lambda w, e=eps: np.abs(w[:, 0]) ** (4 * e - 4.0))
            assert got.real == pytest.approx(math.pi ** 2 / (2 * eps), rel=5e-3)

    def test_disc_monomial_exactness(self):
        rule = quad.build_rule(dom.disc(), 64, 8)
        r2 = np.abs(rule.nodes[:, 0]) ** 2
        for m in range(0, 33):
            got = float(np.sum(rule.weights * r2 ** m))
            assert got == pytest.approx(math.pi / (m + 1), rel=1e-10)

    def test_refinement_stability(self):
        base = quad.integrate(quad.build_rule(dom.disc(), 24, 16),
                              lambda w: np.ones(len(w))).real
        fine = quad.integrate(quad.build_rule(dom.disc(), 48, 16),
                              lambda w: np.ones(len(w))).real
        assert abs(fine - base) <= 1e-8 * abs(base)

    def test_grid_function_and_arrays(self):
        rule = quad.build_rule(dom.disc(), 8, 8)
        gf = quad.GridFunction(rule, np.ones(len(rule)))
        assert quad.integrate(rule, gf).real == pytest.approx(math.pi)
        assert quad.integrate(rule, np.ones(len(rule))).real == pytest.approx(math.pi)

    def test_non_finite_rejected(self):
        rule = quad.build_rule(dom.disc(), 8, 8)
        with pytest.raises(NonFiniteValue):
            quad.integrate(rule, lambda w: np.where(np.abs(w) < 0.5, np.inf, 1.0))
        with pytest.raises(NonFiniteValue):
            quad.GridFunction(rule, np.full(len(rule), np.nan))

    def test_compensated_sum_deterministic(self):
        rng = np.random.default_rng(0)
        vals = rng.standard_normal(200001)
        assert quad.compensated_sum(vals) == quad.compensated_sum(vals.copy())


class TestPatchRule:
    def test_area_and_bounds(self):
        rule = quad.disc_patch_rule(0.3 + 0.2j, 0.25)
        assert rule.weights.sum() == pytest.approx(math.pi * 0.25 ** 2, rel=1e-12)
        assert np.all(np.abs(rule.nodes[:, 0]) < 1)
        with pytest.raises(InvalidResolution):
            quad.disc_patch_rule(0.9 + 0j, 0.2)


class TestTailExponents:
    def test_boas_outer_exponents(self):
        # exponent 2j + 1 - (2k + 2) at infinity
        assert quad.tail_exponent_classify((2 * 0 + 1 - (2 * 1 + 2), "infinity"))
        assert not quad.tail_exponent_classify((2 * 1 + 1 - (2 * 1 + 2), "infinity"))

    def test_origin_power(self):
        assert quad.tail_exponent_classify((-1 + 4 * 0.1, "zero"))
        assert not quad.tail_exponent_classify((-1.5, "zero"))

    def test_multiple_pairs(self):
        assert quad.tail_exponent_classify([(0.5, "zero"), (-2.0, "infinity")])
        assert not quad.tail_exponent_classify([(0.5, "zero"), (-0.5, "infinity")])

    def test_borderline_refused(self):
        with pytest.raises(BorderlineExponent):
            quad.tail_exponent_classify((-1.0 + 1e-12, "zero"))

    def test_exact_harmonic_diverges(self):
        assert not quad.tail_exponent_classify((-1.0, "zero"))
        assert not quad.tail_exponent_classify((-1.0, "infinity"))


class TestSerialization:
    def test_round_trip(self, tmp_path):
        rule = quad.build_rule(dom.hartogs_triangle(), 6, 6)
        path = os.path.join(tmp_path, "rule.bin")
        quad.save_rule(rule, path)
        back = quad.load_rule(path)
        np.testing.assert_array_equal(back.nodes, rule.nodes)
        np.testing.assert_array_equal(back.weights, rule.weights)
        assert back.meta.domain == "hartogs"
        f = lambda w: np.abs(w[:, 0]) ** 2
        assert quad.integrate(back, f) == quad.integrate(rule, f)

    def test_reject_garbage(self, tmp_path):
        path = os.path.join(tmp_path, "junk.bin")
        with open(path, "wb") as fh:
            fh.write(b"not a rule\n")
        with pytest.raises(ValueError):
            quad.load_rule(path)
