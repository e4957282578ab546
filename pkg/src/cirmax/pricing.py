"""Calls on the running maximum of the short rate (and of the affine yield).

The price C(T) = E[e^{-int_0^T r} (sup_{u<=T} r_u - k)_+] has the Laplace
transform in maturity

    U(a~) = int_k^inf J(a~, v) P_a~(v) dv,

where J is the joint transform of (T_v, int_0^{T_v} r) from
:mod:`cirmax.hitting` and P_a~(v) the transform of the discount bond
started at v.  Writing J out through the Kummer ratio gives the
equivalent "outer" form

    U(a~) = e^{-theta r0/sqrt(alpha)} M(c, b~, z(r0))
            * int_k^inf e^{theta v/sqrt(alpha)} P_a~(v) / M(c, b~, z(v)) dv,

c = gamma~/lam~.  Prices come from numerical inversion at T.  The strike
sensitivity inverts dU/dk = -J(a~, k) P_a~(k).
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .bond import APPENDIX, bond_coeffs, p_transform
from .errors import AccuracyError, DomainError, ValidationError
from .hitting import log_joint_lt
from .kummer import kummer_m, log_kummer_m_vec
from .model import YieldSpec, strike_rate_from_yield
from .numerics import (
    EULER,
    GAVER_STEHFEST,
    InversionConfig,
    QuadConfig,
    euler_nodes,
    integrate_semi_infinite,
    laplace_invert,
)

RATE_MAX_CALL = "rate_max_call"
YIELD_MAX_CALL = "yield_max_call"
NEGATIVE_NOISE = 1e-10
# Largest |c| = |gamma~|/lam~ on the Euler contour before the complex Kummer
# series becomes too costly; shorter maturities switch to Gaver-Stehfest.
EULER_C_LIMIT = 4000.0
FALLBACK = InversionConfig(method=GAVER_STEHFEST, terms=16, precision_digits=40)


@dataclass(frozen=True)
class OptionSpec:
    """Maturity and strike of a call on the running maximum.

    Give ``k`` for a rate strike or ``yield_spec`` for a yield strike.
    """

    T: float
    k: float | None = None
    yield_spec: YieldSpec | None = None
    style: str = RATE_MAX_CALL

    def __post_init__(self):
        if not self.T > 0:
            raise ValidationError(f"T > 0 violated (T={self.T})")
        if self.style == RATE_MAX_CALL and self.k is None:
            raise ValidationError("rate option needs a strike k")
        if self.style == YIELD_MAX_CALL and self.yield_spec is None:
            raise ValidationError("yield option needs a YieldSpec")
        if self.style not in (RATE_MAX_CALL, YIELD_MAX_CALL):
            raise ValidationError(f"unknown option style {self.style!r}")

    def rate_strike(self, params=None):
        if self.style == RATE_MAX_CALL:
            return self.k
        return strike_rate_from_yield(self.yield_spec, params)


@dataclass(frozen=True)
class PriceResult:
    value: float
    method: str
    terms: int
    abscissa: float
    v_max: float | None = None
    est_error: float | None = None
    metadata: dict = field(default_factory=dict)

    def as_record(self):
        return {
            "price": self.value,
            "method": self.method,
            "terms": self.terms,
            "abscissa": self.abscissa,
            "v_max": self.v_max,
            "est_error": self.est_error,
            **{key: value for key, value in self.metadata.items() if _jsonable(value)},
        }


def _jsonable(value):
    return isinstance(value, (int, float, str, bool)) or value is None


def _check_strike(params, k):
    if not k >= params.r0:
        raise DomainError(f"strike k={k} below the start rate r0={params.r0}")
    if not k > -params.shift:
        raise DomainError(f"strike k={k} not above -beta/alpha")


def _check_a(params, a_tilde):
    if not complex(a_tilde).real > params.derived.a_tilde_min:
        raise DomainError(f"Re(a~)={complex(a_tilde).real} must exceed a~_min={params.derived.a_tilde_min}")


def _outer_width(params, k, a_tilde):
    d = params.derived
    rate = -d.outer_decay
    # phase speed of M(c, b~, z(v)) in v is about sqrt(|c| z'(v)^2 / z)
    c = abs(complex(a_tilde) + d.s0) / d.lambda_tilde
    dz = 2.0 * d.lambda_tilde / params.alpha
    z = dz * (k + params.shift)
    freq = math.sqrt(c * dz * dz / max(z, 1e-12)) if complex(a_tilde).imag else 0.0
    return 1.0 / max(rate, freq, 1e-3)


def option_lt(params, k, a_tilde, quad=QuadConfig(), form="joint", variant=APPENDIX):
    """U_(k, r0)(a~), the Laplace transform in maturity of the rate-max call price.

    ``form="joint"`` integrates J(a~, v) P_a~(v); ``form="outer"`` pulls the
    start-point Kummer factor outside the integral.  Both use the same
    Gauss-Legendre panels, marched out until the panel mass drops below
    ``quad.tol`` (or cut at ``quad.v_max`` when set).
    """
    _check_strike(params, k)
    _check_a(params, a_tilde)
    d = params.derived
    if form == "joint":

        def integrand(v):
            return np.exp(log_joint_lt(params, a_tilde, v)) * p_transform(
                params, a_tilde, v, tol=quad.tol, order=quad.panel_order, variant=variant
            )

        prefactor = 1.0
    elif form == "outer":
        c = (a_tilde + d.s0) / d.lambda_tilde
        z_start = 2.0 * d.lambda_tilde * (params.r0 + params.shift) / params.alpha
        prefactor = math.exp(-d.theta_over_root_alpha * params.r0) * kummer_m(c, d.b_tilde, z_start)

        def integrand(v):
            z = 2.0 * d.lambda_tilde * (v + params.shift) / params.alpha
            log_w = d.theta_over_root_alpha * v - log_kummer_m_vec(c, d.b_tilde, z)
            return np.exp(log_w) * p_transform(
                params, a_tilde, v, tol=quad.tol, order=quad.panel_order, variant=variant
            )

    else:
        raise ValidationError(f"unknown transform form {form!r}")

    width = _outer_width(params, k, a_tilde)
    upper = quad.v_max if quad.v_max is not None else None
    if upper is not None and not upper > k:
        raise ValidationError(f"v_max={upper} must exceed the strike {k}")
    expected = k - math.log(quad.tol) / -d.outer_decay
    res = integrate_semi_infinite(
        integrand, k, tol=quad.tol, width=width, order=quad.panel_order, upper=upper, expected_upper=expected
    )
    value = prefactor * res.value
    if isinstance(a_tilde, (int, float)):
        value = complex(value).real
    return value


def option_lt_dk(params, k, a_tilde, quad=QuadConfig(), variant=APPENDIX):
    """dU/dk = -J(a~, k) P_a~(k), the transform of the strike sensitivity."""
    _check_strike(params, k)
    _check_a(params, a_tilde)
    j = np.exp(log_joint_lt(params, a_tilde, k))[0]
    value = -j * p_transform(params, a_tilde, k, tol=quad.tol, order=quad.panel_order, variant=variant)
    if isinstance(a_tilde, (int, float)):
        value = complex(value).real
    return value


# ----------------------------------------------------------- real axis


def option_lt_real(params, k, a_tilde, quad=QuadConfig(), variant=APPENDIX):
    """U(a~) at real a~ with the quadrature tolerance tightened to 1e-15.

    This is the Gaver-Stehfest evaluator: its weights reach ~1e9 at 16 terms,
    so the transform error is what limits the real-axis inversion.
    """
    tight = replace(quad, tol=min(quad.tol, 1e-15), panel_order=max(quad.panel_order, 24))
    return option_lt(params, k, float(a_tilde), tight, variant=variant)


# ---------------------------------------------------------------- pricing


def _invert(params, F, F_real, T, inv):
    """Invert at T, switching to Gaver-Stehfest when the Euler contour is out of reach."""
    d = params.derived
    if inv.method == EULER:
        s, _, _, _ = euler_nodes(T, inv, d.a_tilde_min)
        c_max = float(np.max(np.abs(s + d.s0))) / d.lambda_tilde
        if c_max > EULER_C_LIMIT:
            cfg = replace(FALLBACK, precision_digits=inv.precision_digits)
            res = laplace_invert(F, T, cfg, a_min=d.a_tilde_min, F_real=F_real)
            res.metadata.update(fallback=GAVER_STEHFEST, euler_c_max=c_max)
            return res
    return laplace_invert(F, T, inv, a_min=d.a_tilde_min, F_real=F_real)


def _finish(inv, what):
    value = inv.value
    if value < 0:
        if value < -NEGATIVE_NOISE:
            raise AccuracyError(f"inverted {what} {value:.3e} is negative beyond the noise threshold")
        value = 0.0
    return value


def price(params, spec, quad=QuadConfig(), inv=InversionConfig(), variant=APPENDIX):
    """Price of the call on the running maximum described by ``spec``.

    Rate options invert U at t = T.  Yield options price the rate option at
    the mapped strike and scale by A(tau)/tau.  Maturities so short that the
    Euler contour would need |c| above ``EULER_C_LIMIT`` are inverted by
    Gaver-Stehfest instead (real arguments only); the metadata records it.
    """
    if spec.style == YIELD_MAX_CALL:
        return yield_option_price(params, spec.yield_spec, spec.T, quad, inv, variant)
    k = spec.k
    _check_strike(params, k)

    def F(s):
        return option_lt(params, k, s, quad, variant=variant)

    def F_real(s):
        return option_lt_real(params, k, s, quad, variant)

    res = _invert(params, F, F_real, spec.T, inv)
    value = _finish(res, "price")
    meta = dict(res.metadata)
    est = meta.get("cross_rel_diff")
    return PriceResult(
        value=value,
        method=res.method,
        terms=res.terms,
        abscissa=res.abscissa,
        v_max=quad.v_max,
        est_error=None if est is None else est * abs(value),
        metadata=meta,
    )


def dprice_dk(params, k, T, quad=QuadConfig(), inv=InversionConfig(), variant=APPENDIX):
    """dC/dk at maturity T, by inverting the closed-form dU/dk.  Never positive."""
    _check_strike(params, k)
    tight = replace(quad, tol=min(quad.tol, 1e-15), panel_order=max(quad.panel_order, 24))
    res = _invert(
        params,
        lambda s: option_lt_dk(params, k, s, quad, variant),
        lambda s: option_lt_dk(params, k, float(s), tight, variant),
        T,
        inv,
    )
    value = res.value
    if value > 0:
        if value > NEGATIVE_NOISE:
            raise AccuracyError(f"inverted strike sensitivity {value:.3e} is positive")
        value = 0.0
    return value


def yield_option_price(params, y, T, quad=QuadConfig(), inv=InversionConfig(), variant=APPENDIX):
    """Call on the running maximum of the tau-yield: (A(tau)/tau) C(T, k(K))."""
    k = strike_rate_from_yield(y, params)
    if not k >= params.r0:
        raise DomainError(f"mapped strike k={k} is below the start rate r0={params.r0}")
    rate = price(params, OptionSpec(T=T, k=k), quad, inv, variant)
    meta = dict(rate.metadata, rate_strike=k, rate_price=rate.value, scale=y.scale)
    return PriceResult(
        value=y.scale * rate.value,
        method=rate.method,
        terms=rate.terms,
        abscissa=rate.abscissa,
        v_max=rate.v_max,
        est_error=None if rate.est_error is None else y.scale * rate.est_error,
        metadata=meta,
    )


def dprice_dK_yield(params, y, T, quad=QuadConfig(), inv=InversionConfig(), path="composition", variant=APPENDIX):
    """dC/dK for the yield option.

    ``path="composition"`` chains (A(tau)/tau) dC/dk with dk/dK = tau/A(tau);
    ``path="expanded"`` uses the cancelled form, dC/dk evaluated at the
    mapped strike.  The two agree to rounding.
    """
    k = strike_rate_from_yield(y, params)
    if not k >= params.r0:
        raise DomainError(f"mapped strike k={k} is below the start rate r0={params.r0}")
    sens = dprice_dk(params, k, T, quad, inv, variant)
    if path == "composition":
        return (y.A_tau / y.tau) * sens * (y.tau / y.A_tau)
    if path == "expanded":
        return sens
    raise ValidationError(f"unknown path {path!r}")


def yield_spec(params, tau, K, variant=APPENDIX):
    """YieldSpec with A(tau), b(tau) filled from the bond module."""
    c = bond_coeffs(params, tau, variant)
    return YieldSpec(tau=float(tau), K=float(K), A_tau=float(c.A_T), b_tau=float(c.b_T))
