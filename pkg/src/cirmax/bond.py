"""Discount bonds in the affine model.

    B_v(0, T) = exp(-A(T) v - b(T))

with mu = sqrt(lam^2 + 2 alpha), k' = (mu - lam)/(mu + lam) and

    A(T) = (1 + k')/mu * (1 - e^{-mu T}) / (1 + k' e^{-mu T})
    b(T) = (2 phi~/alpha) log((1 + k' e^{-mu T})/(1 + k'))
           + (phi~ (mu - lam)/alpha - beta/alpha) T + (beta/alpha) A(T)

``variant="program"`` divides A by mu a second time.  That variant does not
match the standard CIR factor and exists only for table replication.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .numerics import integrate_semi_infinite, integrate_trapezoid_truncated

APPENDIX = "appendix"
PROGRAM = "program"


@dataclass(frozen=True)
class BondCoeffs:
    mu: float
    k_prime: float
    A_T: object
    b_T: object


def _mu_k(params):
    mu = math.hypot(params.lam, math.sqrt(2.0 * params.alpha))
    return mu, (mu - params.lam) / (mu + params.lam)


def bond_A(params, T, variant=APPENDIX):
    mu, kp = _mu_k(params)
    T = np.asarray(T, dtype=np.float64)
    A = (1.0 + kp) / mu * (-np.expm1(-mu * T)) / (1.0 + kp * np.exp(-mu * T))
    if variant == PROGRAM:
        A = A / mu
    elif variant != APPENDIX:
        raise ValidationError(f"unknown bond variant {variant!r}")
    return A


def bond_b(params, T, variant=APPENDIX, A=None):
    mu, kp = _mu_k(params)
    T = np.asarray(T, dtype=np.float64)
    if A is None:
        A = bond_A(params, T, variant)
    phi_t = params.phi_tilde
    return (
        2.0 * phi_t / params.alpha * np.log1p(kp * np.expm1(-mu * T) / (1.0 + kp))
        + (phi_t * (mu - params.lam) / params.alpha - params.shift) * T
        + params.shift * A
    )


def bond_coeffs(params, T, variant=APPENDIX):
    """mu, k' and the maturity functions A(T), b(T) (T scalar or array, T >= 0)."""
    T_arr = np.asarray(T, dtype=np.float64)
    if np.any(T_arr < 0) or not np.all(np.isfinite(T_arr)):
        raise DomainError("maturity T must be finite and non-negative")
    mu, kp = _mu_k(params)
    A = bond_A(params, T_arr, variant)
    b = bond_b(params, T_arr, variant, A=A)
    if T_arr.ndim == 0:
        A, b = float(A), float(b)
    return BondCoeffs(mu=mu, k_prime=kp, A_T=A, b_T=b)


def cir_A(params, T):
    """Standard CIR factor 2(e^{mu T} - 1)/((mu + lam)(e^{mu T} - 1) + 2 mu), for cross-checks."""
    mu, _ = _mu_k(params)
    g = np.expm1(mu * np.asarray(T, dtype=np.float64))
    return 2.0 * g / ((mu + params.lam) * g + 2.0 * mu)


def _check_rate(params, v):
    v_arr = np.asarray(v, dtype=np.float64)
    if np.any(params.alpha * v_arr + params.beta < 0):
        raise ValidationError(f"start rate below -beta/alpha={-params.shift}")
    return v_arr


def bond_price(params, v, T, variant=APPENDIX):
    """B_v(0, T) = exp(-A(T) v - b(T))."""
    v = _check_rate(params, v)
    c = bond_coeffs(params, T, variant)
    out = np.exp(-c.A_T * v - c.b_T)
    return float(out) if np.ndim(out) == 0 else out


def p_decay_rate(params, a_tilde):
    """Exponential decay rate in T of e^{-a~ T} B_v(0, T): Re(gamma~(a~))."""
    return complex(a_tilde).real + params.derived.s0


def p_transform(params, a_tilde, v, tol=1e-13, scheme="gauss_legendre", order=16, variant=APPENDIX):
    """P_a~(v) = integral over T >= 0 of e^{-a~ T} B_v(0, T); ``v`` scalar or 1-D array.

    ``a~`` may be complex.  The trapezoid scheme is a slow, independent
    cross-check on a fine grid truncated where the integrand falls below
    ``tol``.
    """
    rate = p_decay_rate(params, a_tilde)
    if not rate > 0:
        raise DomainError(f"Re(a~)={complex(a_tilde).real} must exceed a~_min={params.derived.a_tilde_min}")
    v_arr = np.atleast_1d(_check_rate(params, v))
    scalar = np.ndim(v) == 0
    a_tilde = complex(a_tilde) if isinstance(a_tilde, complex) else float(a_tilde)

    def integrand(T):
        c = bond_coeffs(params, T, variant)
        expo = -a_tilde * T[:, None] - c.A_T[:, None] * v_arr[None, :] - c.b_T[:, None]
        return np.exp(expo)

    if scheme == "gauss_legendre":
        width = _panel_width(rate, complex(a_tilde).imag)
        res = integrate_semi_infinite(
            integrand, 0.0, tol=tol, width=width, order=order, expected_upper=-math.log(tol) / rate
        )
        value = np.asarray(res.value)
    elif scheme == "trapezoid":
        upper = (-math.log(tol) + 5.0) / rate
        value = np.asarray(integrate_trapezoid_truncated(integrand, 0.0, upper, min(2e-4, 0.02 / rate)))
    else:
        raise ValidationError(f"unknown quadrature scheme {scheme!r}")
    return value.ravel()[0].item() if scalar else value.ravel()


def _panel_width(rate, freq):
    # a panel spans about one e-fold and at most a third of an oscillation
    scale = max(rate, 3.0 * abs(freq) / math.pi, 1e-3)
    return min(1.0 / scale, 5.0)
