"""Quadrature and numerical Laplace inversion.

* :func:`integrate_rect_trapezoid` -- composite trapezoid on a rectangle,
  either the standard full-grid rule or the variant whose loops start at
  the second grid index (dropping the first row and column).
* :func:`integrate_semi_infinite` -- Gauss-Legendre panels marching out
  from ``a`` until the panel mass is negligible.  Integrands may be
  vector valued: ``f(x)`` returns an array whose first axis runs over ``x``.
* :func:`laplace_invert` -- Abate-Whitt Euler summation on a Bromwich line,
  or Gaver-Stehfest on the real axis in extended precision.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from .errors import AccuracyError, DomainError, ValidationError

GAUSS_LEGENDRE = "gauss_legendre"
TRAPEZOID = "trapezoid"
EULER = "euler"
GAVER_STEHFEST = "gaver_stehfest"


@dataclass(frozen=True)
class QuadConfig:
    """Quadrature settings.

    ``n``/``m`` and ``rule`` drive the rectangle trapezoid.  ``tol`` is the
    relative panel-mass threshold of the semi-infinite integrals and
    ``panel_order`` the Gauss nodes per panel.  ``v_max``/``t_max`` are
    optional hard truncations; left as ``None`` the decay rule decides.
    """

    n: int = 10
    m: int = 10
    scheme: str = GAUSS_LEGENDRE
    tol: float = 1e-13
    panel_order: int = 16
    v_max: float | None = None
    t_max: float | None = None
    rule: str = "full"

    def __post_init__(self):
        if int(self.n) != self.n or int(self.m) != self.m or self.n < 2 or self.m < 2:
            raise ValidationError(f"grid counts n, m must be integers >= 2 (got {self.n}, {self.m})")
        if self.scheme not in (GAUSS_LEGENDRE, TRAPEZOID):
            raise ValidationError(f"unknown quadrature scheme {self.scheme!r}")
        if not 0 < self.tol < 1e-3:
            raise ValidationError(f"tol={self.tol} outside (0, 1e-3)")
        if int(self.panel_order) != self.panel_order or self.panel_order < 2:
            raise ValidationError(f"panel_order must be an integer >= 2 (got {self.panel_order})")
        if self.t_max is not None and not self.t_max > 0:
            raise ValidationError(f"t_max > 0 violated (t_max={self.t_max})")
        if self.rule not in ("full", "paper"):
            raise ValidationError(f"unknown trapezoid rule {self.rule!r}")


@dataclass(frozen=True)
class InversionConfig:
    """Laplace-inversion settings.

    For Euler, ``terms`` is the number of transform evaluations (2M + 1, so
    it should be odd) and the contour sits at least ``bromwich_shift``
    above the transform's convergence abscissa.  Gaver-Stehfest uses an even
    ``terms`` and ``precision_digits`` of working precision.
    """

    method: str = EULER
    terms: int = 35
    bromwich_shift: float = 1.0
    precision_digits: int = 40
    cross_check: bool = False

    def __post_init__(self):
        if self.method not in (EULER, GAVER_STEHFEST):
            raise ValidationError(f"unknown inversion method {self.method!r}")
        if int(self.terms) != self.terms:
            raise ValidationError("terms must be an integer")
        if self.method == EULER and self.terms < 10:
            raise ValidationError(f"Euler inversion needs terms >= 10 (got {self.terms})")
        if self.method == GAVER_STEHFEST and (self.terms < 8 or self.terms % 2):
            raise ValidationError(f"Gaver-Stehfest needs an even terms >= 8 (got {self.terms})")
        if not self.bromwich_shift > 0:
            raise ValidationError(f"bromwich_shift > 0 violated ({self.bromwich_shift})")
        if self.precision_digits < 15:
            raise ValidationError("precision_digits must be at least 15")


# ---------------------------------------------------------------- rectangle


def integrate_rect_trapezoid(f, a, b, c, d, n, m, rule="full"):
    """Composite trapezoid of f(x, y) over [a, b] x [c, d] on an n x m cell grid.

    ``f`` is called once with two broadcastable 2-D arrays.  ``rule="paper"``
    evaluates only the nodes with index >= 1 on each axis and applies the
    corner/edge/interior weights 1/2/4 to that reduced grid, so the first
    row and column drop out; that is the trapezoid on [a + dx, b] x [c + dy, d]
    scaled as though the cells were still n x m of the full rectangle.
    """
    if n < 2 or m < 2:
        raise ValidationError("n and m must be >= 2")
    dx = (b - a) / n
    dy = (d - c) / m
    x = a + dx * np.arange(n + 1)
    y = c + dy * np.arange(m + 1)
    if rule == "full":
        wx = np.full(n + 1, 2.0)
        wy = np.full(m + 1, 2.0)
        wx[[0, -1]] = 1.0
        wy[[0, -1]] = 1.0
    elif rule == "paper":
        x, y = x[1:], y[1:]
        wx = np.full(n, 2.0)
        wy = np.full(m, 2.0)
        wx[[0, -1]] = 1.0
        wy[[0, -1]] = 1.0
    else:
        raise ValidationError(f"unknown trapezoid rule {rule!r}")
    with np.errstate(all="ignore"):
        values = np.asarray(f(x[:, None], y[None, :]))
    if not np.all(np.isfinite(values)):
        raise AccuracyError("non-finite integrand sample on the trapezoid grid")
    return float(np.einsum("i,j,ij->", wx, wy, values.real)) * dx * dy / 4.0 + (
        1j * float(np.einsum("i,j,ij->", wx, wy, values.imag)) * dx * dy / 4.0
        if np.iscomplexobj(values)
        else 0.0
    )


# ------------------------------------------------------------ semi-infinite


@lru_cache(maxsize=16)
def gauss_legendre(order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


@dataclass(frozen=True)
class QuadResult:
    value: object
    upper: float
    panels: int
    est_error: float


def integrate_panels(f, edges, order=16):
    """Gauss-Legendre sum of ``f`` over consecutive panels given by ``edges``."""
    nodes, weights = gauss_legendre(order)
    edges = np.asarray(edges, dtype=np.float64)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    values = np.asarray(f(x))
    return np.tensordot(w, values, axes=(0, 0))


def integrate_semi_infinite(
    f, a=0.0, tol=1e-12, width=1.0, order=16, max_panels=20_000, upper=None, expected_upper=None
):
    """Integral of ``f`` over [a, inf) by Gauss-Legendre panels of fixed ``width``.

    Panels are added in batches until the L1 mass of a panel falls below
    ``tol`` times the magnitude of the running total for three panels in a
    row.  ``upper`` replaces the stopping rule with a hard truncation;
    ``expected_upper`` only sizes the first batch of panels.
    Raises :class:`AccuracyError` if the panel mass fails to shrink for
    three consecutive panels once the integrand has started decaying, or if
    ``max_panels`` is exhausted.
    """
    if not width > 0:
        raise DomainError("panel width must be positive")
    nodes, weights = gauss_legendre(order)
    if upper is not None:
        count = max(1, int(math.ceil((upper - a) / width)))
        edges = np.linspace(a, upper, count + 1)
        return QuadResult(integrate_panels(f, edges, order), float(upper), count, 0.0)

    total = None
    done = 0
    batch = 8
    if expected_upper is not None and expected_upper > a:
        batch = min(max(8, int(math.ceil((expected_upper - a) / width)) + 3), 64)
    small = 0
    rising = 0
    prev_mass = None
    peak_mass = 0.0
    while done < max_panels:
        start = a + done * width
        mid = start + width * (np.arange(batch) + 0.5)
        x = (mid[:, None] + 0.5 * width * nodes[None, :]).ravel()
        values = np.asarray(f(x))
        if not np.all(np.isfinite(values)):
            raise AccuracyError(f"non-finite integrand on [{start}, {start + batch * width}]")
        shaped = values.reshape((batch, order) + values.shape[1:])
        w = 0.5 * width * weights
        panel_vals = np.tensordot(shaped, w, axes=(1, 0)) if shaped.ndim == 2 else np.einsum(
            "po...,o->p...", shaped, w
        )
        masses = np.einsum("po...,o->p...", np.abs(shaped), w)
        for p in range(batch):
            total = panel_vals[p] if total is None else total + panel_vals[p]
            done += 1
            mass = masses[p]
            scale = np.abs(total)
            peak_mass = max(peak_mass, float(np.max(mass)))
            if prev_mass is not None:
                # geometric tail estimate from the last two panels
                q = np.minimum(mass / np.maximum(prev_mass, 1e-300), 0.999)
                tail = mass * q / (1.0 - q)
            else:
                tail = np.inf
            if np.all(np.maximum(mass, tail) <= tol * scale) or float(np.max(mass)) == 0.0:
                small += 1
                if small >= 3:
                    err = float(np.max(np.minimum(tail, mass / (1.0 - 0.999))))
                    return QuadResult(_squeeze(total), a + done * width, done, err)
            else:
                small = 0
            if prev_mass is not None and float(np.max(mass)) < peak_mass:
                # decaying phase: the mass must keep shrinking
                rising = rising + 1 if np.any(mass >= prev_mass) and np.any(mass > tol * scale) else 0
                if rising >= 3:
                    raise AccuracyError(
                        f"integrand stopped decaying near x={a + done * width:g}; decay bound violated"
                    )
            prev_mass = mass
        batch = min(2 * batch, 256)
    raise AccuracyError(f"semi-infinite integral not settled after {max_panels} panels")


def _squeeze(value):
    value = np.asarray(value)
    if value.ndim == 0:
        return value.item()
    return value


def integrate_trapezoid_truncated(f, a, upper, step):
    """Plain trapezoid on [a, upper] with spacing close to ``step``; for cross-checks."""
    count = max(2, int(math.ceil((upper - a) / step)))
    x = np.linspace(a, upper, count + 1)
    values = np.asarray(f(x))
    h = (upper - a) / count
    w = np.full(count + 1, h)
    w[[0, -1]] = 0.5 * h
    return _squeeze(np.tensordot(w, values, axes=(0, 0)))


# ---------------------------------------------------------------- inversion


@dataclass(frozen=True)
class InversionResult:
    value: float
    method: str
    terms: int
    abscissa: float
    metadata: dict = field(default_factory=dict)


@lru_cache(maxsize=32)
def _euler_weights(m_half):
    """Abate-Whitt unified Euler weights eta_k and node constants for M = m_half."""
    m = m_half
    xi = np.zeros(2 * m + 1)
    xi[0] = 0.5
    xi[1 : m + 1] = 1.0
    xi[2 * m] = 2.0**-m
    for k in range(1, m):
        xi[2 * m - k] = xi[2 * m - k + 1] + 2.0**-m * math.comb(m, k)
    k = np.arange(2 * m + 1)
    eta = (-1.0) ** k * 10.0 ** (m / 3.0) * xi
    beta = m * math.log(10.0) / 3.0 + 1j * math.pi * k
    return eta, beta


@lru_cache(maxsize=32)
def _stehfest_weights(n, dps):
    with mpmath.workdps(dps):
        half = n // 2
        out = []
        for k in range(1, n + 1):
            acc = mpmath.mpf(0)
            for j in range((k + 1) // 2, min(k, half) + 1):
                acc += (
                    mpmath.mpf(j) ** half
                    * mpmath.factorial(2 * j)
                    / (
                        mpmath.factorial(half - j)
                        * mpmath.factorial(j)
                        * mpmath.factorial(j - 1)
                        * mpmath.factorial(k - j)
                        * mpmath.factorial(2 * j - k)
                    )
                )
            out.append((-1) ** (k + half) * acc)
        return tuple(out)


def euler_nodes(t, cfg=InversionConfig(), a_min=0.0):
    """Contour points s_k, weights and the exponential factor for Euler inversion at ``t``.

    f(t) ~ factor * sum_k Re(weight_k * F(s_k)).
    """
    m = (int(cfg.terms) - 1) // 2
    eta, beta = _euler_weights(m)
    base = beta[0].real / t
    sigma = max(base, a_min + cfg.bromwich_shift)
    shift = sigma - base
    return beta / t + shift, eta / t, math.exp(shift * t), sigma


def _invert_euler(F, t, cfg, a_min):
    s, w, factor, sigma = euler_nodes(t, cfg, a_min)
    total = 0.0
    for sk, wk in zip(s, w):
        total += (wk * complex(F(complex(sk)))).real
    return factor * total, sigma


def _invert_stehfest(F, t, cfg):
    dps = int(cfg.precision_digits)
    weights = _stehfest_weights(int(cfg.terms), dps)
    with mpmath.workdps(dps):
        ln2t = mpmath.log(2) / mpmath.mpf(t)
        total = mpmath.mpf(0)
        for k, vk in enumerate(weights, start=1):
            total += vk * mpmath.mpf(F(k * ln2t))
        return float(total * ln2t), float(ln2t)


def laplace_invert(F, t, cfg=InversionConfig(), a_min=0.0, F_real=None):
    """Recover f(t) from its Laplace transform ``F``.

    ``F`` takes a complex argument for Euler and an ``mpmath.mpf`` for
    Gaver-Stehfest; ``F_real`` may supply a separate high-precision real
    evaluator for the latter.  With ``cfg.cross_check`` both methods run
    and the relative gap is stored in the metadata, flagged when above 1e-4.
    """
    if not t > 0:
        raise DomainError(f"inversion time must be positive (t={t})")
    meta = {}
    if cfg.method == EULER:
        value, sigma = _invert_euler(F, t, cfg, a_min)
    else:
        value, sigma = _invert_stehfest(F_real or F, t, cfg)
    if cfg.cross_check:
        if cfg.method == EULER:
            other_cfg = InversionConfig(method=GAVER_STEHFEST, terms=16, precision_digits=cfg.precision_digits)
            other, _ = _invert_stehfest(F_real or F, t, other_cfg)
        else:
            other, _ = _invert_euler(F, t, InversionConfig(), a_min)
        gap = abs(value - other) / max(abs(value), abs(other), 1e-300)
        meta.update(cross_value=float(other), cross_rel_diff=float(gap), disagreement=bool(gap > 1e-4))
    return InversionResult(
        value=float(value), method=cfg.method, terms=int(cfg.terms), abscissa=float(sigma), metadata=meta
    )
