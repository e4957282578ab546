import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cirmax.errors import AccuracyError, DomainError, ValidationError
from cirmax.numerics import (
    InversionConfig,
    QuadConfig,
    euler_nodes,
    integrate_rect_trapezoid,
    integrate_semi_infinite,
    integrate_trapezoid_truncated,
    laplace_invert,
)

PAIRS = [
    (lambda s: 1 / s, lambda t: 1.0),
    (lambda s: 1 / (s + 1), lambda t: math.exp(-t)),
    (lambda s: 1 / s**2, lambda t: t),
]
GS16 = InversionConfig(method="gaver_stehfest", terms=16, precision_digits=40)


class TestConfigs:
    @pytest.mark.parametrize(
        "kwargs",
        [dict(n=1), dict(scheme="simpson"), dict(tol=0.0), dict(panel_order=1), dict(t_max=-1.0), dict(rule="x")],
    )
    def test_quad_rejects(self, kwargs):
        with pytest.raises(ValidationError):
            QuadConfig(**kwargs)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(method="talbot"),
            dict(terms=9),
            dict(method="gaver_stehfest", terms=15),
            dict(method="gaver_stehfest", terms=6),
            dict(bromwich_shift=0.0),
            dict(precision_digits=10),
        ],
    )
    def test_inversion_rejects(self, kwargs):
        with pytest.raises(ValidationError):
            InversionConfig(**kwargs)

    def test_defaults(self):
        cfg = InversionConfig()
        assert (cfg.method, cfg.terms, cfg.bromwich_shift) == ("euler", 35, 1.0)


class TestRectangle:
    @staticmethod
    def exact():
        return (math.e - 1) ** 2

    def test_quadratic_convergence(self):
        f = lambda x, y: np.exp(x) * np.exp(y)
        errors = [abs(integrate_rect_trapezoid(f, 0, 1, 0, 1, n, n) - self.exact()) for n in (8, 16, 32)]
        for coarse, fine in zip(errors[:-1], errors[1:]):
            assert 3.5 <= coarse / fine <= 4.5

    def test_constant_is_exact(self):
        assert integrate_rect_trapezoid(lambda x, y: np.ones(np.broadcast(x, y).shape), 0, 2, 0, 3, 4, 5) == (
            pytest.approx(6.0, rel=1e-15)
        )

    def test_paper_rule_drops_first_row_and_column(self):
        f = lambda x, y: np.exp(x) * np.exp(y)
        n = 10
        h = 1.0 / n
        reduced = integrate_rect_trapezoid(f, h, 1, h, 1, n - 1, n - 1)
        assert integrate_rect_trapezoid(f, 0, 1, 0, 1, n, n, rule="paper") == pytest.approx(reduced, rel=1e-14)

    def test_singular_sample_raises(self):
        with pytest.raises(AccuracyError):
            integrate_rect_trapezoid(lambda x, y: 1 / x + 0 * y, 0, 1, 0, 1, 4, 4)

    def test_unknown_rule(self):
        with pytest.raises(ValidationError):
            integrate_rect_trapezoid(lambda x, y: x * y, 0, 1, 0, 1, 4, 4, rule="simpson")


class TestSemiInfinite:
    @pytest.mark.parametrize("rate", [0.3, 1.0, 24.0])
    def test_exponential(self, rate):
        res = integrate_semi_infinite(lambda x: np.exp(-rate * x), 0.0, tol=1e-14, width=1 / rate)
        assert res.value == pytest.approx(1 / rate, rel=1e-13)
        assert res.upper > 0

    def test_flat_bond_stub(self):
        # a bond B = e^{-v T} has transform 1/(a + v) in maturity
        for a in (0.5, 1.0, 3.0):
            res = integrate_semi_infinite(lambda t: np.exp(-(a + 0.1) * t), 0.0, tol=1e-14)
            assert res.value == pytest.approx(1 / (a + 0.1), rel=1e-13)

    def test_oscillatory_complex(self):
        s = 2.0 + 5.0j
        res = integrate_semi_infinite(lambda x: np.exp(-s * x), 0.0, tol=1e-14, width=0.25)
        assert abs(res.value - 1 / s) < 1e-13

    def test_vector_valued(self):
        rates = np.array([0.5, 2.0])
        res = integrate_semi_infinite(lambda x: np.exp(-np.outer(x, rates)), 0.0, tol=1e-14)
        np.testing.assert_allclose(res.value, 1 / rates, rtol=1e-13)

    def test_growth_detected(self):
        bump = lambda x: np.exp(-x) + np.exp(0.5 * (x - 30.0))
        with pytest.raises(AccuracyError):
            integrate_semi_infinite(bump, 0.0, tol=1e-12, max_panels=200)

    def test_hard_truncation(self):
        res = integrate_semi_infinite(lambda x: np.exp(-x), 0.0, upper=5.0)
        assert res.value == pytest.approx(1 - math.exp(-5), rel=1e-14)

    def test_bad_width(self):
        with pytest.raises(DomainError):
            integrate_semi_infinite(lambda x: x, 0.0, width=0.0)

    def test_trapezoid_cross_check(self):
        val = integrate_trapezoid_truncated(lambda x: np.exp(-x), 0.0, 40.0, 1e-3)
        assert val == pytest.approx(1.0, rel=1e-6)


class TestInversion:
    @pytest.mark.parametrize("index", range(3))
    @pytest.mark.parametrize("t", [0.5, 1.0, 2.0, 3.0])
    def test_euler_known_pairs(self, index, t):
        F, f = PAIRS[index]
        assert laplace_invert(F, t).value == pytest.approx(f(t), rel=1e-8, abs=1e-12)

    @pytest.mark.parametrize("index", range(3))
    def test_stehfest_agrees_with_euler(self, index):
        F, _ = PAIRS[index]
        euler = laplace_invert(F, 1.0).value
        assert laplace_invert(F, 1.0, GS16).value == pytest.approx(euler, rel=1e-6)

    @pytest.mark.parametrize("index", range(3))
    def test_round_trip(self, index):
        F, _ = PAIRS[index]
        inverted = np.vectorize(lambda t: laplace_invert(F, float(t)).value if t > 0 else 0.0)
        for s in np.linspace(1.0, 3.0, 5):
            res = integrate_semi_infinite(lambda t: np.exp(-s * t) * inverted(t), 0.0, tol=1e-10, width=1.0)
            assert res.value == pytest.approx(F(s), rel=1e-6)

    def test_abscissa_respects_domain(self):
        _, _, _, sigma = euler_nodes(1.0, InversionConfig(), a_min=20.0)
        assert sigma >= 21.0

    def test_shifted_abscissa_still_inverts(self):
        # pole at s = 5; the discretisation error scales with the growth of f
        val = laplace_invert(lambda s: 1 / (s - 5), 1.0, a_min=5.0).value
        assert val == pytest.approx(math.exp(5.0), rel=1e-6)

    def test_cross_check_metadata(self):
        res = laplace_invert(PAIRS[1][0], 1.0, InversionConfig(cross_check=True))
        assert res.metadata["cross_rel_diff"] < 1e-6
        assert not res.metadata["disagreement"]

    def test_disagreement_flagged(self):
        # a jump at t = 1 defeats both methods differently
        F = lambda s: mpmath.exp(-s) / s
        res = laplace_invert(F, 1.0, InversionConfig(cross_check=True))
        assert res.metadata["disagreement"]

    def test_nonpositive_time(self):
        with pytest.raises(DomainError):
            laplace_invert(PAIRS[0][0], 0.0)

    @settings(max_examples=25, deadline=None)
    @given(rate=st.floats(0.0, 5.0), t=st.floats(0.1, 5.0))
    def test_exponentials(self, rate, t):
        value = laplace_invert(lambda s: 1 / (s + rate), t).value
        assert value == pytest.approx(math.exp(-rate * t), rel=1e-8, abs=1e-10)
