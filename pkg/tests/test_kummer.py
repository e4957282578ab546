import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cirmax import kernels
from cirmax.errors import AccuracyError, DomainError
from cirmax.kummer import (
    kummer_m,
    kummer_m_derivative,
    kummer_m_truncated,
    log_kummer_m,
    log_kummer_m_vec,
    log_kummer_ratio,
    truncated_coefficients_in_c,
)


def mp_series(c, b, z, dps=60):
    """Direct power series at ``dps`` digits, summed until terms fall below 10^-dps."""
    with mpmath.workdps(dps):
        c, b, z = mpmath.mpmathify(c), mpmath.mpf(b), mpmath.mpf(z)
        t = s = mpmath.mpf(1)
        n = 0
        while True:
            t = t * (c + n) * z / ((b + n) * (n + 1))
            s += t
            n += 1
            if abs(t) < mpmath.mpf(10) ** (-dps) * abs(s) and n > abs(c) + z:
                return s


def rel(a, b):
    return abs(a - b) / abs(b)


class TestOracleGrid:
    @pytest.mark.parametrize("c", [0.0, 0.5, 1.0, 5.0])
    @pytest.mark.parametrize("b", [0.5, 4.0, 10.0])
    @pytest.mark.parametrize("z", [0.0, 0.5, 4.0, 20.0])
    def test_real_grid(self, c, b, z):
        assert rel(kummer_m(c, b, z), float(mp_series(c, b, z))) <= 1e-12

    @pytest.mark.parametrize("c", [0.3 + 2j, 5 - 40j, 46 + 380j, 184 + 1500j])
    @pytest.mark.parametrize("z", [1.0, 40.0, 45.0])
    def test_complex_log(self, c, z):
        ref = complex(mpmath.log(mp_series(c, 4.0, z, dps=120)))
        got = log_kummer_m(c, 4.0, z)
        assert abs(got.real - ref.real) <= 1e-11 * max(1.0, abs(ref.real))
        assert abs(cmath_wrap(got.imag - ref.imag)) <= 1e-10

    def test_known_large_imaginary_value(self):
        # cancellation of ~e^{100}: forces the extended-precision tiers
        got = log_kummer_m(184 + 1500j, 4.0, 45.0)
        ref = complex(mpmath.log(mp_series(184 + 1500j, 4.0, 45.0, dps=150)))
        assert abs(got.real - ref.real) < 1e-10

    def test_mpmath_hyp1f1_agrees(self):
        assert rel(kummer_m(2.5, 4.0, 30.0), float(mpmath.hyp1f1(2.5, 4.0, 30.0))) <= 1e-13


def cmath_wrap(x):
    return math.remainder(x, 2 * math.pi)


class TestIdentities:
    @pytest.mark.parametrize("b", [0.5, 4.0, 10.0])
    def test_c_zero_is_one(self, b):
        assert kummer_m(0, b, 17.0) == 1.0

    @pytest.mark.parametrize("z", np.linspace(0.0, 50.0, 26))
    @pytest.mark.parametrize("b", [0.5, 4.0, 10.0])
    def test_c_equals_b_is_exponential(self, b, z):
        assert rel(kummer_m(b, b, z), math.exp(z)) <= 1e-12

    @pytest.mark.parametrize("c", [0.1, 1.0, 5.0])
    @pytest.mark.parametrize("b", [0.5, 4.0, 10.0])
    @pytest.mark.parametrize("z", [0.1, 1.0, 10.0, 30.0])
    def test_ode_residual(self, c, b, z):
        m = kummer_m(c, b, z)
        m1 = kummer_m_derivative(c, b, z)
        m2 = c / b * kummer_m_derivative(c + 1, b + 1, z)
        assert abs(z * m2 + (b - z) * m1 - c * m) <= 1e-8 * (1 + abs(m))

    def test_derivative_vs_finite_difference(self):
        h = 1e-5
        fd = (kummer_m(1.5, 4.0, 3.0 + h) - kummer_m(1.5, 4.0, 3.0 - h)) / (2 * h)
        assert rel(kummer_m_derivative(1.5, 4.0, 3.0), fd) < 1e-8

    @pytest.mark.parametrize("c", [0.5, 3.0, 2 + 7j])
    def test_ratio_antisymmetry(self, c):
        a = log_kummer_ratio(c, 4.0, 2.0, 35.0)
        b = log_kummer_ratio(c, 4.0, 35.0, 2.0)
        assert abs(a + b) <= 1e-12 * max(1.0, abs(a))

    def test_ratio_matches_difference(self):
        expected = math.log(kummer_m(2.0, 4.0, 10.0)) - math.log(kummer_m(2.0, 4.0, 3.0))
        assert abs(log_kummer_ratio(2.0, 4.0, 10.0, 3.0) - expected) < 1e-12

    def test_log_form_beyond_double_range(self):
        lg = log_kummer_m(3.0, 4.0, 900.0)
        assert lg > 709
        with pytest.raises(AccuracyError):
            kummer_m(3.0, 4.0, 900.0)

    def test_vector_matches_scalar(self):
        z = np.array([0.0, 0.5, 7.0, 45.0, 120.0])
        vec = log_kummer_m_vec(2 + 30j, 4.0, z)
        for zi, vi in zip(z, vec):
            si = log_kummer_m(2 + 30j, 4.0, float(zi))
            assert abs(vi.real - complex(si).real) < 1e-10
            assert abs(cmath_wrap(vi.imag - complex(si).imag)) < 1e-9


class TestTruncated:
    def test_partial_sum(self):
        expected = 1 + 2.0 * 3.0 / 4.0 + 2.0 * 3.0 * 3.0**2 / (4.0 * 5.0 * 2)
        assert kummer_m_truncated(2.0, 4.0, 3.0, 3) == pytest.approx(expected, rel=1e-15)

    @pytest.mark.parametrize("c", [0.3, 1.7, 4.0])
    def test_polynomial_in_c(self, c):
        coeffs = truncated_coefficients_in_c(4.0, 6.0, 10)
        assert np.polyval(coeffs, c) == pytest.approx(kummer_m_truncated(c, 4.0, 6.0, 10), rel=1e-13)

    def test_converges_to_full(self):
        assert kummer_m_truncated(1.5, 4.0, 2.0, 60) == pytest.approx(kummer_m(1.5, 4.0, 2.0), rel=1e-13)

    def test_bad_term_count(self):
        with pytest.raises(DomainError):
            kummer_m_truncated(1.0, 4.0, 1.0, 0)


class TestDomain:
    @pytest.mark.parametrize("b", [0.0, -1.0, -3.0])
    def test_nonpositive_integer_b(self, b):
        with pytest.raises(DomainError):
            kummer_m(1.0, b, 1.0)

    def test_negative_z(self):
        with pytest.raises(DomainError):
            kummer_m(1.0, 4.0, -0.5)

    def test_backend_reported(self):
        assert kernels.BACKEND in ("cython", "python")


class TestProperties:
    @settings(max_examples=60, deadline=None)
    @given(
        c=st.floats(0.01, 20.0),
        b=st.floats(0.1, 30.0),
        z=st.floats(0.0, 60.0),
        dz=st.floats(0.01, 5.0),
    )
    def test_strictly_increasing_in_z(self, c, b, z, dz):
        assert log_kummer_m(c, b, z + dz) > log_kummer_m(c, b, z)

    @settings(max_examples=40, deadline=None)
    @given(c=st.floats(0.0, 10.0), b=st.floats(0.2, 20.0), z=st.floats(0.0, 40.0))
    def test_matches_mpmath(self, c, b, z):
        ref = mpmath.log(mpmath.hyp1f1(c, b, z, maxterms=10**6))
        assert abs(log_kummer_m(c, b, z) - float(ref)) <= 1e-12 * max(1.0, abs(float(ref)))

    @settings(max_examples=30, deadline=None)
    @given(b=st.floats(0.2, 20.0), z=st.floats(0.0, 50.0))
    def test_exponential_identity(self, b, z):
        assert abs(log_kummer_m(b, b, z) - z) <= 1e-12 * max(1.0, z)
