import math
import warnings

import numpy as np
import pytest

from cirmax.bond import PROGRAM, bond_A, bond_b, bond_coeffs, bond_price, cir_A, p_transform
from cirmax.errors import DomainError, FellerWarning, ValidationError
from cirmax.mc_oracle import McConfig, mc_bond
from cirmax.model import AffineParams

MATURITIES = [0.01, 0.25, 1.0, 5.0, 30.0]


def random_params(rng):
    alpha = rng.uniform(1e-4, 0.1)
    lam = rng.uniform(0.01, 2.0)
    beta = rng.uniform(-0.5, 0.5) * alpha
    phi = rng.uniform(0.001, 0.1) - lam * beta / alpha + 1e-3
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FellerWarning)
        return AffineParams(phi, lam, alpha, beta, 0.05 + max(0.0, -beta / alpha))


class TestCoefficients:
    def test_two_forms_agree(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            p = random_params(rng)
            np.testing.assert_allclose(bond_A(p, MATURITIES), cir_A(p, MATURITIES), rtol=1e-12)

    def test_zero_maturity(self, case1):
        c = bond_coeffs(case1, 0.0)
        assert (c.A_T, c.b_T) == (0.0, 0.0)
        assert bond_price(case1, 0.1, 0.0) == 1.0

    def test_case1_values(self, case1):
        assert bond_A(case1, 1.0) == pytest.approx(0.9036217020397854, rel=1e-14)
        assert bond_price(case1, 0.1, 1.0) == pytest.approx(0.905356304987032, rel=1e-13)

    @pytest.mark.parametrize("T", [0.1, 1.0, 7.0])
    def test_riccati_equations(self, case1, T):
        # A' = 1 - lam A - alpha A^2/2 and b' = phi A - beta A^2/2 for dr = (phi - lam r)dt + sqrt(alpha r + beta) dW
        h = 1e-5
        A = bond_A(case1, T)
        dA = (bond_A(case1, T + h) - bond_A(case1, T - h)) / (2 * h)
        db = (bond_b(case1, T + h) - bond_b(case1, T - h)) / (2 * h)
        assert dA == pytest.approx(1 - case1.lam * A - 0.5 * case1.alpha * A * A, rel=1e-8)
        assert db == pytest.approx(case1.phi * A - 0.5 * case1.beta * A * A, rel=1e-7)

    @pytest.mark.parametrize("tau", [0.25, 1.0, 10.0])
    def test_yield_consistency(self, case1, tau):
        c = bond_coeffs(case1, tau)
        for v in (0.0, 0.1, 0.3):
            assert -math.log(bond_price(case1, v, tau)) / tau == pytest.approx((c.A_T * v + c.b_T) / tau, rel=1e-14)

    def test_program_variant_divides_by_mu(self, case1):
        c = bond_coeffs(case1, 1.0)
        assert bond_A(case1, 1.0, PROGRAM) == pytest.approx(c.A_T / c.mu, rel=1e-15)

    def test_array_maturities(self, case1):
        c = bond_coeffs(case1, np.array([0.5, 1.0]))
        assert c.A_T.shape == (2,)

    def test_negative_maturity(self, case1):
        with pytest.raises(DomainError):
            bond_coeffs(case1, -1.0)

    def test_rate_below_floor(self, case1):
        with pytest.raises(ValidationError):
            bond_price(case1, -0.5, 1.0)

    def test_unknown_variant(self, case1):
        with pytest.raises(ValidationError):
            bond_A(case1, 1.0, "other")


class TestTransform:
    def test_schemes_agree(self, case1):
        gl = p_transform(case1, 1.0, 0.1)
        tr = p_transform(case1, 1.0, 0.1, scheme="trapezoid")
        assert gl == pytest.approx(0.910747905604175, rel=1e-12)
        assert tr == pytest.approx(gl, rel=1e-7)

    def test_complex_argument(self, case1):
        a = 2.0 + 3.0j
        val = p_transform(case1, a, 0.15)
        conj = p_transform(case1, a.conjugate(), 0.15)
        assert abs(val - conj.conjugate()) < 1e-14

    def test_decreasing_in_a(self, case1):
        values = [p_transform(case1, a, 0.1) for a in (0.5, 1.0, 2.0, 8.0, 50.0)]
        assert all(x > y > 0 for x, y in zip(values[:-1], values[1:]))

    def test_vector_v(self, case1):
        v = np.array([0.1, 0.2, 0.4])
        np.testing.assert_allclose(p_transform(case1, 1.0, v), [p_transform(case1, 1.0, x) for x in v], rtol=1e-13)

    def test_small_alpha_limit(self):
        # alpha -> 0: deterministic rate, P is a plain exponential integral
        p = AffineParams(1e-9, 1e-6, 1e-10, 0.0, 0.1)
        assert p_transform(p, 1.0, 0.1) == pytest.approx(1 / 1.1, rel=1e-6)

    def test_domain(self, case1):
        with pytest.raises(DomainError):
            p_transform(case1, -5.0, 0.1)


class TestMonteCarlo:
    @pytest.mark.parametrize("T", [0.25, 1.0])
    def test_small_sample(self, case1, T):
        est = mc_bond(case1, 0.1, T, McConfig(paths=40_000, steps=100, seed=5))
        assert abs(est.value - bond_price(case1, 0.1, T)) <= 4 * est.stderr
