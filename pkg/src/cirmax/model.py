"""Affine short-rate model parameters and their measure-change constants.

The short rate follows

    dr = (phi - lam * r) dt + sqrt(alpha * r + beta) dw

and the shifted rate r~ = r + beta/alpha is a CIR process with drift
constant phi~ = phi + lam*beta/alpha.  Tilting by the Girsanov weight
theta * sqrt(r~) turns the joint (hitting time, discount) functional into a
pure hitting-time transform of a CIR process with speed lam~ = lam +
theta*sqrt(alpha).
"""

import json
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

from .errors import DomainError, FellerWarning, ValidationError

MODEL_KEYS = ("phi", "lambda", "alpha", "beta", "r0")
OPTION_KEYS = ("tau", "K", "T", "k")


@dataclass(frozen=True)
class DerivedParams:
    """Constants of the tilted measure.

    ``s0`` is the offset in gamma~ = a~ + s0 and ``shift`` is beta/alpha.
    """

    theta: float
    lambda_tilde: float
    phi_tilde0: float
    phi_tilde: float
    b_tilde: float
    a_tilde_min: float
    shift: float
    s0: float
    theta_over_root_alpha: float = field(repr=False)
    alpha: float = field(repr=False)

    @property
    def outer_decay(self):
        """Exponent of the outer-integrand envelope e^{(theta/sqrt(alpha) - 2 lam~/alpha) v} (negative)."""
        return self.theta_over_root_alpha - 2.0 * self.lambda_tilde / self.alpha


@dataclass(frozen=True)
class AffineParams:
    """Model constants and start rate; validated at construction.

    Raises :class:`ValidationError` naming the violated condition.  A
    :class:`FellerWarning` is emitted (not raised) when 2 phi~ < alpha.
    """

    phi: float
    lam: float
    alpha: float
    beta: float
    r0: float

    def __post_init__(self):
        for name in ("phi", "lam", "alpha", "beta", "r0"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, float(value))
        if not self.alpha > 0:
            raise ValidationError(f"alpha > 0 violated (alpha={self.alpha})")
        if not self.lam > 0:
            raise ValidationError(f"lambda > 0 violated (lambda={self.lam})")
        if not self.phi_tilde > 0:
            raise ValidationError(f"phi + lambda*beta/alpha > 0 violated (got {self.phi_tilde})")
        if self.alpha * self.r0 + self.beta < 0:
            raise ValidationError(
                f"alpha*r0 + beta >= 0 violated (r0={self.r0} below -beta/alpha={-self.shift})"
            )
        if 2.0 * self.phi_tilde < self.alpha:
            warnings.warn(
                f"Feller condition fails (2 phi~ = {2 * self.phi_tilde:g} < alpha = {self.alpha:g}); "
                "the shifted rate can reach zero",
                FellerWarning,
                stacklevel=3,
            )

    @property
    def shift(self):
        return self.beta / self.alpha

    @property
    def phi_tilde(self):
        return self.phi + self.lam * self.beta / self.alpha

    @cached_property
    def derived(self):
        return derive(self)

    def replace(self, **changes):
        values = {name: getattr(self, name) for name in ("phi", "lam", "alpha", "beta", "r0")}
        values.update(changes)
        return AffineParams(**values)

    def to_dict(self):
        return {"phi": self.phi, "lambda": self.lam, "alpha": self.alpha, "beta": self.beta, "r0": self.r0}

    @classmethod
    def from_mapping(cls, mapping):
        missing = [key for key in MODEL_KEYS if key not in mapping]
        if missing:
            raise ValidationError(f"missing model keys: {', '.join(missing)}")
        return cls(
            phi=mapping["phi"],
            lam=mapping["lambda"],
            alpha=mapping["alpha"],
            beta=mapping["beta"],
            r0=mapping["r0"],
        )


def derive(params):
    """Measure-change constants for ``params``.

    theta is the positive root of theta^2/2 + lam*theta/sqrt(alpha) = 1.
    """
    if not isinstance(params, AffineParams):
        raise ValidationError("derive expects AffineParams")
    root_alpha = math.sqrt(params.alpha)
    mu = math.hypot(params.lam, math.sqrt(2.0 * params.alpha))
    # (mu - lam) written without cancellation
    theta = 2.0 * root_alpha / (params.lam + mu)
    lambda_tilde = params.lam + theta * root_alpha
    phi_tilde = params.phi_tilde
    ratio = theta / root_alpha
    s0 = ratio * phi_tilde - params.shift
    return DerivedParams(
        theta=theta,
        lambda_tilde=lambda_tilde,
        phi_tilde0=params.phi - params.beta * ratio,
        phi_tilde=phi_tilde,
        b_tilde=2.0 * phi_tilde / params.alpha,
        a_tilde_min=max(0.0, -s0),
        shift=params.shift,
        s0=s0,
        theta_over_root_alpha=ratio,
        alpha=params.alpha,
    )


def gamma_tilde(params, a_tilde):
    """gamma~ = a~ - beta/alpha + theta phi~/sqrt(alpha); requires Re(a~) > a~_min."""
    d = params.derived
    if not complex(a_tilde).real > d.a_tilde_min:
        raise DomainError(f"Re(a~)={complex(a_tilde).real} must exceed a~_min={d.a_tilde_min}")
    return a_tilde + d.s0


@dataclass(frozen=True)
class YieldSpec:
    """Yield tenor, yield strike and the bond coefficients A(tau), b(tau)."""

    tau: float
    K: float
    A_tau: float
    b_tau: float

    def __post_init__(self):
        if not self.tau > 0:
            raise ValidationError(f"tau > 0 violated (tau={self.tau})")
        if not self.A_tau > 0:
            raise ValidationError(f"A(tau) > 0 violated (A={self.A_tau})")

    @classmethod
    def from_params(cls, params, tau, K, variant="appendix"):
        from .bond import bond_coeffs

        coeffs = bond_coeffs(params, tau, variant=variant)
        return cls(tau=float(tau), K=float(K), A_tau=float(coeffs.A_T), b_tau=float(coeffs.b_T))

    @property
    def scale(self):
        """A(tau)/tau, the factor turning a rate-option price into a yield-option price."""
        return self.A_tau / self.tau


def strike_rate_from_yield(y, params=None):
    """Rate strike k = (tau K - b(tau)) / A(tau) equivalent to yield strike K."""
    k = (y.tau * y.K - y.b_tau) / y.A_tau
    if params is not None and not k > -params.shift:
        raise DomainError(f"mapped strike k={k} is not above -beta/alpha={-params.shift}")
    return k


@dataclass(frozen=True)
class NovikovReport:
    a_nov: float
    admissible: bool
    limiting_exponent: str


def novikov_check(phi, lam, alpha, beta):
    """Whether the Girsanov tilt with weight theta sqrt(r~) is a true measure change.

    Takes raw constants because the lam < 0 branch is outside what
    :class:`AffineParams` accepts.  The tilt is admissible when lam and
    phi~ share a sign; the limiting exponent of the auxiliary bond is then
    finite.
    """
    if alpha == 0 or lam == 0:
        raise ValidationError("novikov_check needs alpha != 0 and lambda != 0")
    if alpha < 0:
        raise ValidationError("alpha must be positive")
    theta = (-lam + math.sqrt(lam * lam + 2.0 * alpha)) / math.sqrt(alpha)
    phi_tilde = phi + lam * beta / alpha
    admissible = (lam > 0 and phi_tilde > 0) or (lam < 0 and phi_tilde < 0)
    return NovikovReport(
        a_nov=0.5 * theta * theta,
        admissible=admissible,
        limiting_exponent="finite" if admissible else "infinite",
    )


def load_config(path):
    """Read a JSON config file into a dict."""
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
