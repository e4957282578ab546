"""Laplace transforms of first-passage times of the short rate to a level above the start.

Under Q, with z(x) = 2 lam (x + beta/alpha)/alpha,

    E[e^{-gamma T_a}] = M(gamma/lam, b~, z(r0)) / M(gamma/lam, b~, z(a)).

Under the tilted measure Q* the rate has speed lam~ and the same ratio
holds with lam~ in place of lam.  The joint transform

    E[e^{-a~ T_v - int_0^{T_v} r ds}] = e^{theta (v - r0)/sqrt(alpha)} E*[e^{-gamma~ T_v}]

follows from the change of measure.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BelowStartWarning, DomainError, ValidationError
from .kummer import log_kummer_m, log_kummer_m_vec


@dataclass(frozen=True)
class HittingQuery:
    gamma: complex
    level: float

    def __post_init__(self):
        if not complex(self.gamma).real >= 0:
            raise ValidationError(f"Re(gamma) >= 0 violated (gamma={self.gamma})")


def _z(params, speed, x):
    return 2.0 * speed * (np.asarray(x, dtype=np.float64) + params.shift) / params.alpha


def _level_array(params, level):
    arr = np.asarray(level, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("barrier level must be finite")
    below = arr < params.r0
    if np.any(below):
        warnings.warn("barrier below the start rate is hit at time 0; transform set to 1", BelowStartWarning, stacklevel=3)
    return arr, below


def _ratio(params, c, speed, level):
    """exp(log M(c, b~, z(r0)) - log M(c, b~, z(level))) for scalar or array level."""
    d = params.derived
    levels, below = _level_array(params, level)
    flat = np.atleast_1d(levels).ravel()
    z_top = _z(params, speed, np.maximum(flat, params.r0))
    if c == 0:
        out = np.ones(flat.shape)
    else:
        log_top = log_kummer_m_vec(c, d.b_tilde, z_top)
        log_start = log_kummer_m(c, d.b_tilde, float(_z(params, speed, params.r0)))
        out = np.exp(log_start - log_top)
        if isinstance(c, (int, float)):
            out = out.real
    out[np.atleast_1d(below).ravel()] = 1.0
    out = out.reshape(np.shape(levels))
    return out.item() if out.ndim == 0 else out


def hit_lt_q(params, gamma, level):
    """E^Q[e^{-gamma T_a}] for the first passage of r to ``level`` (scalar or array)."""
    HittingQuery(gamma, 0.0)
    c = gamma / params.lam
    return _ratio(params, c, params.lam, level)


def hit_lt_qstar(params, gamma_t, level):
    """E^{Q*}[e^{-gamma~ T_v}] under the tilted dynamics; requires Re(gamma~) > 0."""
    if not complex(gamma_t).real > 0:
        raise DomainError(f"Re(gamma~) > 0 violated (gamma~={gamma_t})")
    d = params.derived
    return _ratio(params, gamma_t / d.lambda_tilde, d.lambda_tilde, level)


def joint_lt(params, a_tilde, level):
    """E^Q[exp(-a~ T_v - int_0^{T_v} r ds)] at barrier ``level`` (scalar or array)."""
    d = params.derived
    if not complex(a_tilde).real > d.a_tilde_min:
        raise DomainError(f"Re(a~)={complex(a_tilde).real} must exceed a~_min={d.a_tilde_min}")
    levels, _ = _level_array(params, level)
    tilt = np.exp(d.theta_over_root_alpha * (np.maximum(levels, params.r0) - params.r0))
    out = tilt * np.asarray(hit_lt_qstar(params, a_tilde + d.s0, level))
    return out.item() if np.ndim(out) == 0 else out


def log_joint_lt(params, a_tilde, level):
    """Logarithm of :func:`joint_lt`, for levels where the value underflows."""
    d = params.derived
    if not complex(a_tilde).real > d.a_tilde_min:
        raise DomainError(f"Re(a~)={complex(a_tilde).real} must exceed a~_min={d.a_tilde_min}")
    levels = np.maximum(np.atleast_1d(np.asarray(level, dtype=np.float64)), params.r0)
    c = (a_tilde + d.s0) / d.lambda_tilde
    log_top = log_kummer_m_vec(c, d.b_tilde, _z(params, d.lambda_tilde, levels))
    log_start = log_kummer_m(c, d.b_tilde, float(_z(params, d.lambda_tilde, params.r0)))
    return d.theta_over_root_alpha * (levels - params.r0) + log_start - log_top


def survival_bound(gamma, horizon):
    """Weight e^{-Re(gamma) horizon} left on paths that have not hit by ``horizon``."""
    return math.exp(-complex(gamma).real * horizon)
