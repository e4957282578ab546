"""Monte Carlo ground truth for bonds, hitting transforms and max-rate calls.

Paths of the shifted rate x = r + beta/alpha, a CIR process

    dx = (phi~ - kappa x) dt + sqrt(alpha x) dw,

with kappa = lam under Q and kappa = lam~ under the tilted measure Q*,
are advanced by exact transitions: x(t + h) given x(t) is c_h times a
noncentral chi-square with d = 4 phi~/alpha degrees of freedom, where
c_h = alpha (1 - e^{-kappa h})/(4 kappa).

Paths are produced in fixed-size blocks, each with its own generator
seeded from (seed, block index), so the output depends only on the seed
and the block size.

Between grid points the path is treated as a Brownian bridge with the
local volatility sqrt(alpha x(t)): the running maximum is drawn from the
bridge-maximum law and barrier crossings are detected with the bridge
crossing probability.  ``max_correction="none"`` keeps the plain grid
maximum.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

EXACT = "exact_ncchi2"
EULER_FT = "euler_full_truncation"
Q = "Q"
Q_STAR = "Q_star"


@dataclass(frozen=True)
class McConfig:
    paths: int = 100_000
    steps: int = 500
    seed: int = 42
    scheme: str = EXACT
    antithetic: bool = False
    block_size: int = 50_000
    max_correction: str = "bridge"

    def __post_init__(self):
        if int(self.paths) != self.paths or self.paths < 1000:
            raise ValidationError(f"paths must be an integer >= 1000 (got {self.paths})")
        if int(self.steps) != self.steps or self.steps < 100:
            raise ValidationError(f"steps must be an integer >= 100 (got {self.steps})")
        if self.scheme not in (EXACT, EULER_FT):
            raise ValidationError(f"unknown scheme {self.scheme!r}")
        if self.max_correction not in ("bridge", "none"):
            raise ValidationError(f"unknown max_correction {self.max_correction!r}")
        if self.block_size < 2 or self.block_size % 2:
            raise ValidationError("block_size must be an even integer >= 2")
        if self.antithetic and self.paths % 2:
            raise ValidationError("antithetic sampling needs an even path count")


@dataclass
class PathFunctionals:
    """Per-path functionals of one block.

    ``max_rate`` and ``discount_integral`` have shape (paths,) or, with
    observation times, (paths, n_obs).  ``first_hit`` is NaN for paths
    that never reach the level.
    """

    max_rate: np.ndarray
    discount_integral: np.ndarray
    terminal: np.ndarray
    first_hit: np.ndarray | None = None
    hit_integral: np.ndarray | None = None


@dataclass(frozen=True)
class McEstimate:
    value: float
    stderr: float
    paths: int
    steps: int
    seed: int
    scheme: str
    extra: dict = field(default_factory=dict)

    def as_record(self):
        return {
            "value": self.value,
            "stderr": self.stderr,
            "paths": self.paths,
            "steps": self.steps,
            "seed": self.seed,
            "scheme": self.scheme,
            **self.extra,
        }


def _speed(params, measure):
    if measure == Q:
        return params.lam
    if measure == Q_STAR:
        return params.derived.lambda_tilde
    raise ValidationError(f"unknown measure {measure!r}")


def _block_rng(seed, block):
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(block)]))


def _block_sizes(cfg):
    sizes = []
    left = int(cfg.paths)
    while left > 0:
        sizes.append(min(cfg.block_size, left))
        left -= sizes[-1]
    return sizes


class _Stepper:
    """One transition x(t) -> x(t + h) for a vector of states."""

    def __init__(self, params, kappa, scheme, antithetic):
        self.alpha = params.alpha
        self.phi_t = params.phi_tilde
        self.kappa = kappa
        self.scheme = scheme
        self.dof = 4.0 * self.phi_t / self.alpha
        self.antithetic = antithetic
        if antithetic and scheme == EXACT and self.dof <= 1.0:
            warnings.warn("antithetic pairing needs d > 1 in the exact scheme; drawing independently", stacklevel=3)
            self.antithetic = False

    def __call__(self, rng, x, h):
        if self.scheme == EULER_FT:
            return self._euler(rng, x, h)
        decay = math.exp(-self.kappa * h)
        c = self.alpha * (-math.expm1(-self.kappa * h)) / (4.0 * self.kappa)
        nonc = x * (decay / c)
        if not self.antithetic:
            return c * rng.noncentral_chisquare(self.dof, nonc)
        # chi2_d(nc) = (Z + sqrt(nc))^2 + chi2_{d-1}, with Z negated on the twin path
        half = x.size // 2
        z = rng.standard_normal(half)
        z = np.concatenate([z, -z])
        rest = 2.0 * rng.standard_gamma(0.5 * (self.dof - 1.0), x.size)
        return c * ((z + np.sqrt(nonc)) ** 2 + rest)

    def _euler(self, rng, x, h):
        half = x.size // 2
        if self.antithetic:
            z = rng.standard_normal(half)
            z = np.concatenate([z, -z])
        else:
            z = rng.standard_normal(x.size)
        xp = np.maximum(x, 0.0)
        return x + (self.phi_t - self.kappa * xp) * h + np.sqrt(self.alpha * xp * h) * z


def time_grid(T, steps, observe=None):
    """Grid on [0, T] with about ``steps`` cells that contains every observation time."""
    if observe is None:
        return np.linspace(0.0, T, int(steps) + 1)
    obs = np.unique(np.asarray(observe, dtype=np.float64))
    if obs[0] <= 0 or obs[-1] > T * (1 + 1e-12):
        raise ValidationError("observation times must lie in (0, T]")
    knots = np.concatenate([[0.0], obs[obs < T], [T]])
    dt = T / steps
    pieces = [np.array([0.0])]
    for lo, hi in zip(knots[:-1], knots[1:]):
        count = max(1, int(math.ceil((hi - lo) / dt - 1e-9)))
        pieces.append(np.linspace(lo, hi, count + 1)[1:])
    return np.concatenate(pieces)


def _simulate_block(params, grid, rng, stepper, size, r_start, bridge, observe_idx=None, level=None):
    shift = params.shift
    x = np.full(size, r_start + shift)
    run_max = x.copy()
    integral = np.zeros(size)
    n_obs = 0 if observe_idx is None else len(observe_idx)
    if n_obs:
        max_obs = np.empty((size, n_obs))
        int_obs = np.empty((size, n_obs))
        slot = {int(i): j for j, i in enumerate(observe_idx)}
    hit = None
    hit_int = None
    if level is not None:
        barrier = level + shift
        hit = np.full(size, np.nan)
        hit_int = np.full(size, np.nan)
    for i in range(1, grid.size):
        h = grid[i] - grid[i - 1]
        x_new = stepper(rng, x, h)
        if bridge or level is not None:
            var = params.alpha * np.maximum(x, 0.0) * h
        if bridge:
            u = rng.random(size)
            gap = x_new - x
            top = 0.5 * (x + x_new + np.sqrt(gap * gap - 2.0 * var * np.log1p(-u)))
            np.maximum(run_max, top, out=run_max)
        else:
            np.maximum(run_max, x_new, out=run_max)
        if level is not None:
            fresh = np.isnan(hit)
            ends = x_new >= barrier
            u = rng.random(size)
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                p_cross = np.exp(-2.0 * (barrier - x) * (barrier - x_new) / var)
            crossed = fresh & (ends | (u < p_cross))
            if crossed.any():
                # place the passage by linear interpolation when the step ends above,
                # at mid-step when only the bridge crosses
                with np.errstate(divide="ignore", invalid="ignore"):
                    frac = np.where(ends, (barrier - x) / (x_new - x), 0.5)
                frac = np.clip(np.nan_to_num(frac, nan=0.5), 0.0, 1.0)[crossed]
                hit[crossed] = grid[i - 1] + frac * h
                x_cross = x[crossed] + frac * (barrier - x[crossed])
                hit_int[crossed] = integral[crossed] + 0.5 * frac * h * (x[crossed] + x_cross) - frac * h * shift
        integral += 0.5 * h * (x + x_new) - h * shift
        x = x_new
        if n_obs and i in slot:
            max_obs[:, slot[i]] = run_max
            int_obs[:, slot[i]] = integral
    if n_obs:
        return PathFunctionals(max_obs - shift, int_obs, x - shift, hit, hit_int)
    return PathFunctionals(run_max - shift, integral, x - shift, hit, hit_int)


def iter_blocks(params, T, cfg=McConfig(), measure=Q, r_start=None, observe=None, level=None):
    """Yield :class:`PathFunctionals` block by block (the streaming form of :func:`simulate`)."""
    if not T > 0:
        raise ValidationError(f"horizon T must be positive (T={T})")
    kappa = _speed(params, measure)
    r_start = params.r0 if r_start is None else float(r_start)
    stepper = _Stepper(params, kappa, cfg.scheme, cfg.antithetic)
    if cfg.scheme == EULER_FT and 2.0 * params.phi_tilde < params.alpha:
        warnings.warn("Feller condition fails; Euler scheme uses full truncation at zero", stacklevel=2)
    grid = time_grid(T, cfg.steps, observe)
    observe_idx = None
    if observe is not None:
        obs = np.unique(np.asarray(observe, dtype=np.float64))
        observe_idx = [int(np.argmin(np.abs(grid - t))) for t in obs]
    bridge = cfg.max_correction == "bridge"
    for block, size in enumerate(_block_sizes(cfg)):
        rng = _block_rng(cfg.seed, block)
        yield _simulate_block(params, grid, rng, stepper, size, r_start, bridge, observe_idx, level)


def simulate(params, T, cfg=McConfig(), measure=Q, r_start=None, observe=None, level=None):
    """All paths' functionals, concatenated over blocks."""
    blocks = list(iter_blocks(params, T, cfg, measure, r_start, observe, level))

    def cat(name):
        parts = [getattr(b, name) for b in blocks]
        return None if parts[0] is None else np.concatenate(parts)

    return PathFunctionals(
        cat("max_rate"), cat("discount_integral"), cat("terminal"), cat("first_hit"), cat("hit_integral")
    )


def _pairwise_sum(values):
    """Order-fixed tree reduction over the first axis."""
    values = np.asarray(values, dtype=np.float64)
    while values.shape[0] > 1:
        if values.shape[0] % 2:
            values = np.concatenate([values, np.zeros((1,) + values.shape[1:])])
        values = values[0::2] + values[1::2]
    return values[0]


def _estimate(samples, antithetic):
    samples = np.asarray(samples, dtype=np.float64)
    if antithetic:
        # pair each path with its twin; twins sit half a block apart
        samples = samples.reshape(-1)
        samples = 0.5 * (samples[0::2] + samples[1::2])
    n = samples.shape[0]
    mean = _pairwise_sum(samples) / n
    var = _pairwise_sum((samples - mean) ** 2) / (n - 1)
    return mean, np.sqrt(var / n)


def _twin_order(values, cfg):
    """Reorder so antithetic twins are adjacent (they are generated half a block apart)."""
    if not cfg.antithetic:
        return values
    out = []
    start = 0
    for size in _block_sizes(cfg):
        part = values[start : start + size]
        half = size // 2
        out.append(np.stack([part[:half], part[half:]], axis=1).reshape(size, *part.shape[1:]))
        start += size
    return np.concatenate(out)


def _record(cfg, value, stderr, **extra):
    return McEstimate(float(value), float(stderr), int(cfg.paths), int(cfg.steps), int(cfg.seed), cfg.scheme, extra)


def mc_price(params, T, k, cfg=McConfig(), measure=Q):
    """E[e^{-int_0^T r} (max r - k)_+] with its standard error."""
    f = simulate(params, T, cfg, measure)
    payoff = np.exp(-f.discount_integral) * np.maximum(f.max_rate - k, 0.0)
    mean, se = _estimate(_twin_order(payoff, cfg), cfg.antithetic)
    return _record(cfg, mean, se, T=T, k=k)


def mc_bond(params, v, T, cfg=McConfig()):
    """E[e^{-int_0^T r}] for the rate started at ``v``."""
    if T == 0:
        return _record(cfg, 1.0, 0.0, T=0.0, v=v)
    f = simulate(params, T, cfg, Q, r_start=v)
    mean, se = _estimate(_twin_order(np.exp(-f.discount_integral), cfg), cfg.antithetic)
    return _record(cfg, mean, se, T=T, v=v)


def mc_hit_lt(params, level, gammas, cfg=McConfig(), measure=Q, bias_tol=1e-4, max_horizon=400.0, segment=1.0):
    """E[e^{-gamma T_a}] for each gamma in ``gammas``, from one set of simulated passages.

    Paths are advanced in segments of length ``segment`` with ``cfg.steps``
    steps each until the weight left on survivors, e^{-gamma_min t} times
    the surviving fraction, is below ``bias_tol``.  Returns a list of
    estimates; each carries that bias bound and the horizon reached.
    """
    gammas = np.atleast_1d(np.asarray(gammas, dtype=np.float64))
    if level <= params.r0:
        return [_record(cfg, 1.0, 0.0, gamma=float(g), level=level, horizon=0.0, bias_bound=0.0) for g in gammas]
    g_min = float(np.min(gammas))
    kappa = _speed(params, measure)
    # compaction breaks antithetic pairs, so passages are drawn independently
    stepper = _Stepper(params, kappa, cfg.scheme, False)
    h = segment / cfg.steps
    barrier = level + params.shift
    hits = []
    horizon = 0.0
    survivors_total = 0
    for block, size in enumerate(_block_sizes(cfg)):
        rng = _block_rng(cfg.seed, block)
        x = np.full(size, params.r0 + params.shift)
        idx = np.arange(size)
        hit = np.full(size, np.inf)
        t = 0.0
        while idx.size:
            for _ in range(cfg.steps):
                x_new = stepper(rng, x, h)
                var = params.alpha * np.maximum(x, 0.0) * h
                u = rng.random(x.size)
                ends = x_new >= barrier
                with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                    p_cross = np.exp(-2.0 * (barrier - x) * (barrier - x_new) / var)
                    frac = np.where(ends, (barrier - x) / (x_new - x), 0.5)
                crossed = ends | (u < p_cross)
                if crossed.any():
                    frac = np.clip(np.nan_to_num(frac, nan=0.5), 0.0, 1.0)
                    hit[idx[crossed]] = t + frac[crossed] * h
                    keep = ~crossed
                    idx, x_new = idx[keep], x_new[keep]
                x = x_new
                t += h
                if not idx.size:
                    break
            bound = math.exp(-g_min * t) * idx.size / size
            if bound < bias_tol or t >= max_horizon:
                break
        horizon = max(horizon, t)
        survivors_total += idx.size
        hits.append(hit)
    hit = np.concatenate(hits)
    bias = math.exp(-g_min * horizon) * survivors_total / cfg.paths
    if bias >= bias_tol:
        warnings.warn(f"hitting-time bias bound {bias:.2e} exceeds {bias_tol:.1e} at horizon {horizon:g}", stacklevel=2)
    out = []
    for g in gammas:
        weights = np.where(np.isfinite(hit), np.exp(-g * np.where(np.isfinite(hit), hit, 0.0)), 0.0)
        mean, se = _estimate(weights, False)
        out.append(
            _record(
                cfg,
                mean,
                se,
                gamma=float(g),
                level=float(level),
                horizon=horizon,
                bias_bound=math.exp(-g * horizon) * survivors_total / cfg.paths,
            )
        )
    return out


def mc_joint_lt(params, a_tilde, level, cfg=McConfig(), measure=Q, horizon=None):
    """E[e^{-a~ T_v - int_0^{T_v} r ds}] estimated under either measure.

    Under Q the path functional is averaged directly.  Under Q* the tilted
    dynamics give E*[e^{-gamma~ T_v}], multiplied by e^{theta (v - r0)/sqrt(alpha)}.
    """
    d = params.derived
    if level <= params.r0:
        return _record(cfg, 1.0, 0.0, a_tilde=a_tilde, level=level, measure=measure)
    if measure == Q_STAR:
        res = mc_hit_lt(params, level, [a_tilde + d.s0], cfg, Q_STAR)[0]
        tilt = math.exp(d.theta_over_root_alpha * (level - params.r0))
        return _record(cfg, tilt * res.value, tilt * res.stderr, a_tilde=a_tilde, level=level, measure=measure)
    if horizon is None:
        horizon = 40.0 / max(a_tilde, 0.1)
    steps = max(cfg.steps, int(math.ceil(horizon * cfg.steps)))
    run_cfg = McConfig(cfg.paths, steps, cfg.seed, cfg.scheme, False, cfg.block_size, cfg.max_correction)
    f = simulate(params, horizon, run_cfg, Q, level=level)
    found = np.isfinite(f.first_hit)
    weights = np.zeros(found.size)
    weights[found] = np.exp(-a_tilde * f.first_hit[found] - f.hit_integral[found])
    mean, se = _estimate(weights, False)
    return _record(cfg, mean, se, a_tilde=a_tilde, level=level, measure=measure, horizon=horizon)


def forward_nodes(n_nodes=20, x_max=5.0):
    """Maturities T_i = x_i^2 and weights for int_0^{x_max^2} g(T) dT = int_0^{x_max} g(x^2) 2x dx."""
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    x = 0.5 * x_max * (nodes + 1.0)
    w = 0.5 * x_max * weights * 2.0 * x
    return x * x, w


def mc_forward_transform(params, k, a_values, cfg=McConfig(), n_nodes=20, x_max=5.0, steps_per_year=200):
    """Laplace transform in maturity of the Monte Carlo price curve.

    One simulation observed at the Gauss nodes T_i gives, per path, the sum
    over i of w_i e^{-a~ T_i} payoff_i; its mean and standard error are the
    estimate.  The truncation at T = x_max^2 leaves e^{-a~ x_max^2} times a
    bounded price.
    """
    T_nodes, w = forward_nodes(n_nodes, x_max)
    horizon = float(T_nodes[-1])
    steps = max(cfg.steps, int(math.ceil(horizon * steps_per_year)))
    run_cfg = McConfig(cfg.paths, steps, cfg.seed, cfg.scheme, cfg.antithetic, cfg.block_size, cfg.max_correction)
    sums = {float(a): [] for a in a_values}
    for f in iter_blocks(params, horizon, run_cfg, Q, observe=T_nodes):
        payoff = np.exp(-f.discount_integral) * np.maximum(f.max_rate - k, 0.0)
        for a in sums:
            sums[a].append(payoff @ (w * np.exp(-a * T_nodes)))
    out = []
    for a, parts in sums.items():
        samples = _twin_order(np.concatenate(parts), run_cfg)
        mean, se = _estimate(samples, run_cfg.antithetic)
        out.append(_record(run_cfg, mean, se, a_tilde=a, nodes=n_nodes))
    return out
