import math

import numpy as np
import pytest

from cirmax.errors import BelowStartWarning, DomainError, ValidationError
from cirmax.hitting import HittingQuery, hit_lt_q, hit_lt_qstar, joint_lt, log_joint_lt, survival_bound
from cirmax.mc_oracle import Q, Q_STAR, McConfig, mc_hit_lt, mc_joint_lt


class TestQTransform:
    def test_pinned_value(self, case1):
        assert hit_lt_q(case1, 0.5, 0.15) == pytest.approx(0.4556327096, rel=1e-9)

    def test_zero_rate_limit(self, case1):
        for level in (0.12, 0.15, 0.3):
            assert abs(hit_lt_q(case1, 1e-10, level) - 1.0) <= 1e-8

    def test_bounds_and_ordering(self, case1):
        gammas = np.array([0.05, 0.25, 0.5, 1.0, 4.0])
        levels = np.array([0.11, 0.12, 0.15, 0.2, 0.3])
        table = np.array([[hit_lt_q(case1, g, a) for a in levels] for g in gammas])
        assert np.all((table > 0) & (table <= 1))
        assert np.all(np.diff(table, axis=0) < 0)
        assert np.all(np.diff(table, axis=1) < 0)

    def test_vector_levels(self, case1):
        levels = np.array([0.12, 0.15])
        np.testing.assert_allclose(hit_lt_q(case1, 0.5, levels), [hit_lt_q(case1, 0.5, a) for a in levels], rtol=1e-14)

    def test_level_at_start(self, case1):
        assert hit_lt_q(case1, 0.5, case1.r0) == pytest.approx(1.0, abs=1e-15)

    def test_below_start(self, case1):
        with pytest.warns(BelowStartWarning):
            assert hit_lt_q(case1, 0.5, 0.05) == 1.0

    def test_negative_gamma(self, case1):
        with pytest.raises(ValidationError):
            hit_lt_q(case1, -0.1, 0.15)
        with pytest.raises(ValidationError):
            HittingQuery(-1.0 + 2j, 0.2)


class TestJoint:
    def test_pinned_value(self, case1):
        assert joint_lt(case1, 1.0, 0.15) == pytest.approx(0.30950719, rel=1e-7)

    @pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("level", [0.12, 0.15, 0.3])
    def test_bounded_by_tilt(self, case1, a, level):
        d = case1.derived
        assert 0 < joint_lt(case1, a, level) <= math.exp(d.theta_over_root_alpha * (level - case1.r0))

    def test_log_form(self, case1):
        levels = np.array([0.12, 0.5, 2.0])
        np.testing.assert_allclose(np.exp(log_joint_lt(case1, 1.0, levels).real), joint_lt(case1, 1.0, levels), rtol=1e-12)

    def test_log_form_far_level(self, case1):
        assert log_joint_lt(case1, 1.0, np.array([40.0]))[0].real < -500

    def test_conjugate_symmetry(self, case1):
        a = 1.5 + 4.0j
        assert joint_lt(case1, a, 0.2) == pytest.approx(np.conj(joint_lt(case1, np.conj(a), 0.2)), rel=1e-12)

    def test_domain(self, case1):
        with pytest.raises(DomainError):
            joint_lt(case1, -1.0, 0.15)
        with pytest.raises(DomainError):
            hit_lt_qstar(case1, 0.0, 0.15)

    def test_qstar_matches_q_formula_with_speed(self, case1):
        # Q* is the same model with lam replaced by lam~ and phi by phi~0
        d = case1.derived
        twin = case1.replace(lam=d.lambda_tilde, phi=d.phi_tilde0)
        assert hit_lt_qstar(case1, 0.7, 0.2) == pytest.approx(hit_lt_q(twin, 0.7, 0.2), rel=1e-12)

    def test_survival_bound(self):
        assert survival_bound(0.5, 10.0) == pytest.approx(math.exp(-5.0))


class TestMonteCarlo:
    def test_q_small_sample(self, case1):
        est = mc_hit_lt(case1, 0.15, [0.5, 1.0], McConfig(paths=20_000, steps=100, seed=9))
        for e in est:
            assert abs(e.value - hit_lt_q(case1, e.extra["gamma"], 0.15)) <= 4 * e.stderr
            assert e.extra["bias_bound"] < 1e-4

    def test_cross_measure(self, case1):
        cfg = McConfig(paths=20_000, steps=100, seed=13)
        under_q = mc_joint_lt(case1, 1.0, 0.15, cfg, Q)
        under_qstar = mc_joint_lt(case1, 1.0, 0.15, cfg, Q_STAR)
        combined = math.hypot(under_q.stderr, under_qstar.stderr)
        assert abs(under_q.value - under_qstar.value) <= 3 * combined
        assert abs(under_qstar.value - joint_lt(case1, 1.0, 0.15)) <= 4 * under_qstar.stderr
