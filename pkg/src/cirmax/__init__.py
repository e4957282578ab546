"""Calls on the running maximum of the short rate in the one-factor affine (CIR) model.

Prices come from the closed-form Laplace transform in maturity, inverted
numerically; an exact-transition Monte Carlo oracle checks them.
"""

from .bond import BondCoeffs, bond_coeffs, bond_price, p_transform
from .errors import AccuracyError, BelowStartWarning, CirmaxError, DomainError, FellerWarning, ValidationError
from .hitting import HittingQuery, hit_lt_q, hit_lt_qstar, joint_lt
from .kernels import BACKEND
from .kummer import kummer_m, kummer_m_derivative, kummer_m_truncated, log_kummer_m, log_kummer_ratio
from .mc_oracle import McConfig, McEstimate, PathFunctionals, mc_bond, mc_hit_lt, mc_joint_lt, mc_price, simulate
from .model import AffineParams, DerivedParams, NovikovReport, YieldSpec, derive, gamma_tilde, novikov_check
from .model import strike_rate_from_yield
from .numerics import InversionConfig, QuadConfig, integrate_rect_trapezoid, integrate_semi_infinite, laplace_invert
from .pricing import (
    OptionSpec,
    PriceResult,
    dprice_dk,
    dprice_dK_yield,
    option_lt,
    option_lt_dk,
    price,
    yield_option_price,
    yield_spec,
)
from .replication import paper_table_lt, table2

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AccuracyError",
    "AffineParams",
    "BelowStartWarning",
    "BondCoeffs",
    "CirmaxError",
    "DerivedParams",
    "DomainError",
    "FellerWarning",
    "HittingQuery",
    "InversionConfig",
    "McConfig",
    "McEstimate",
    "NovikovReport",
    "OptionSpec",
    "PathFunctionals",
    "PriceResult",
    "QuadConfig",
    "ValidationError",
    "YieldSpec",
    "bond_coeffs",
    "bond_price",
    "derive",
    "dprice_dK_yield",
    "dprice_dk",
    "gamma_tilde",
    "hit_lt_q",
    "hit_lt_qstar",
    "integrate_rect_trapezoid",
    "integrate_semi_infinite",
    "joint_lt",
    "kummer_m",
    "kummer_m_derivative",
    "kummer_m_truncated",
    "laplace_invert",
    "log_kummer_m",
    "log_kummer_ratio",
    "mc_bond",
    "mc_hit_lt",
    "mc_joint_lt",
    "mc_price",
    "novikov_check",
    "option_lt",
    "option_lt_dk",
    "p_transform",
    "paper_table_lt",
    "price",
    "simulate",
    "strike_rate_from_yield",
    "table2",
    "yield_option_price",
    "yield_spec",
]
