"""Kummer's confluent hypergeometric function M(c, b, z).

Evaluated from its power series

    M(c, b, z) = sum_n (c)_n z^n / ((b)_n n!)

with the term recurrence t_{n+1} = t_n (c + n) z / ((b + n)(n + 1)).  The
parameter ``c`` may be complex (numerical Laplace inversion evaluates the
transform off the real axis); ``b`` is real and not a non-positive integer,
``z`` is real and non-negative.

Accumulation happens in the compiled kernel's long double.  When the
largest term dwarfs the sum (complex ``c`` with large imaginary part) the
series is re-summed in 113-bit arithmetic and, if that is still not
enough, in mpmath at a precision sized from the observed cancellation.

There is no asymptotic large-z branch.  The practical range is bounded by
the 10 000-term cap: roughly z below 9 000 for moderate ``c``.  Beyond it
an :class:`AccuracyError` is raised.
"""

import cmath
import math
from numbers import Real

import mpmath
import numpy as np

from . import kernels
from .errors import AccuracyError, DomainError

DEFAULT_TOL = 1e-12
MAX_TERMS = 10_000
_LOG_DBL_MAX = math.log(np.finfo(np.float64).max)


def _is_real(c):
    return isinstance(c, Real)


def _validate(b, z, tol=None):
    b = float(b)
    if b <= 0 and b == math.floor(b):
        raise DomainError(f"b={b} is zero or a negative integer; M(c, b, z) undefined")
    z_arr = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(z_arr)) or np.any(z_arr < 0):
        raise DomainError("z must be finite and non-negative")
    if tol is not None and not (0.0 < tol <= 1e-6):
        raise DomainError(f"tol={tol} outside (0, 1e-6]")
    return b


def _settled(result, eps, tol):
    log_sum, log_max, n_terms, status = result
    if status != 1:
        return False
    loss = log_max - log_sum.real
    return n_terms * eps * math.exp(min(loss, 700.0)) <= 0.125 * tol


def _series_mp_once(c, b, z, tol, dps):
    with mpmath.workdps(dps):
        cc = mpmath.mpc(c)
        zz = mpmath.mpf(z)
        bb = mpmath.mpf(b)
        eps = mpmath.mpf(tol)
        t = mpmath.mpc(1)
        s = mpmath.mpc(1)
        t_max = mpmath.mpf(1)
        small = 0
        n = 0
        while n < MAX_TERMS:
            t = t * (cc + n) * zz / ((bb + n) * (n + 1))
            n += 1
            s += t
            at = abs(t)
            if at > t_max:
                t_max = at
            if at <= eps * abs(s):
                small += 1
                if small == 3:
                    break
            else:
                small = 0
        else:
            raise AccuracyError(f"Kummer series did not converge in {MAX_TERMS} terms (c={c}, z={z})")
        if s == 0:
            return None, float(mpmath.log(t_max)), n
        return complex(mpmath.log(s)), float(mpmath.log(t_max)), n


def _series_mp(c, b, z, tol, loss):
    """Sum at a precision covering the cancellation; re-check against the result."""
    tol_digits = -math.log10(tol)
    digits = loss / math.log(10.0) + tol_digits + 10
    for _ in range(6):
        dps = max(int(digits), 30)
        lg, log_max, n = _series_mp_once(c, b, z, tol, dps)
        if lg is not None:
            needed = (log_max - lg.real) / math.log(10.0) + math.log10(n) + tol_digits + 3
            if needed <= dps:
                return lg
            digits = needed + 10
        else:
            digits = 2 * dps
    raise AccuracyError(f"Kummer series cancellation not resolved (c={c}, z={z})")


def _log_series(c, b, z, tol):
    first = kernels.series_fast(c, b, z, tol, MAX_TERMS)
    if _settled(first, kernels.FAST_EPS, tol):
        return first[0]
    if first[3] == 0:
        raise AccuracyError(f"Kummer series did not converge in {MAX_TERMS} terms (c={c}, z={z})")
    if kernels.HAS_WIDE:
        second = kernels.series_wide(c, b, z, tol, MAX_TERMS)
        if _settled(second, kernels.WIDE_EPS, tol):
            return second[0]
    loss = first[1] - first[0].real if first[3] == 1 else 2.0 * math.sqrt(abs(complex(c)) * z) + z
    return _series_mp(c, b, z, tol, max(loss, 0.0))


def log_kummer_m(c, b, z, tol=DEFAULT_TOL):
    """Return log M(c, b, z).

    Real ``c`` gives a real result when M > 0 (always the case for c >= 0);
    otherwise the principal complex logarithm is returned.
    """
    b = _validate(b, z, tol)
    z = float(z)
    if c == 0 or z == 0.0:
        return 0.0 if _is_real(c) else 0j
    lg = _log_series(c, b, z, tol)
    if _is_real(c) and abs(lg.imag) < 1e-12:
        return lg.real
    return lg


def log_kummer_m_vec(c, b, z, tol=DEFAULT_TOL):
    """Vectorised :func:`log_kummer_m` over an array of ``z`` (complex result)."""
    b = _validate(b, z, tol)
    z = np.ascontiguousarray(z, dtype=np.float64).ravel()
    if c == 0:
        return np.zeros(z.shape, dtype=np.complex128)
    log_sum, log_max, n_terms, status = kernels.series_fast_vec(c, b, z, tol, MAX_TERMS)
    if np.any(status == 0):
        bad = float(z[status == 0][0])
        raise AccuracyError(f"Kummer series did not converge in {MAX_TERMS} terms (c={c}, z={bad})")
    with np.errstate(over="ignore", invalid="ignore"):
        loss = np.where(status == 1, log_max - log_sum.real, np.inf)
        budget = n_terms * kernels.FAST_EPS * np.exp(np.minimum(loss, 700.0))
    redo = np.nonzero(~(budget <= 0.125 * tol))[0]
    for i in redo:
        log_sum[i] = _log_series(c, b, float(z[i]), tol)
    return log_sum


def kummer_m(c, b, z, tol=DEFAULT_TOL):
    """Kummer's function M(c, b, z) from its power series.

    Raises :class:`DomainError` for a non-positive integer ``b`` or
    negative ``z``, and :class:`AccuracyError` if the series does not
    settle within the term cap or the value overflows a double (use
    :func:`log_kummer_m` for large arguments).
    """
    lg = log_kummer_m(c, b, z, tol)
    if lg.real > _LOG_DBL_MAX:
        raise AccuracyError(f"M({c}, {b}, {z}) exceeds the double range; use log_kummer_m")
    if isinstance(lg, float):
        return math.exp(lg)
    value = cmath.exp(lg)
    return value.real if _is_real(c) else value


def log_kummer_ratio(c, b, z1, z2, tol=DEFAULT_TOL):
    """log(M(c, b, z1) / M(c, b, z2)) without forming either M.

    Each logarithm comes from the overflow-free series; the difference is
    accurate to about twice the evaluation tolerance.
    """
    _validate(b, [z1, z2], tol)
    if z1 == z2 or c == 0:
        return 0.0 if _is_real(c) else 0j
    out = log_kummer_m(c, b, z1, tol) - log_kummer_m(c, b, z2, tol)
    if isinstance(out, complex):
        # bring the imaginary part back to the principal branch
        out = complex(out.real, math.remainder(out.imag, 2.0 * math.pi))
        if _is_real(c) and out.imag == 0.0:
            return out.real
    if not math.isfinite(out.real):
        raise AccuracyError("log Kummer ratio overflowed")
    return out


def kummer_m_derivative(c, b, z, tol=DEFAULT_TOL):
    """dM/dz via the contiguous relation dM/dz = (c/b) M(c+1, b+1, z)."""
    _validate(b, z, tol)
    if c == 0:
        return 0.0 if _is_real(c) else 0j
    return c / b * kummer_m(c + 1, b + 1, z, tol)


def kummer_m_truncated(c, b, z, p):
    """First ``p`` power-series terms of M(c, b, z), as a plain partial sum."""
    if int(p) != p or p < 1:
        raise DomainError(f"term count p={p} must be a positive integer")
    _validate(b, z)
    t = 1.0
    s = 1.0
    for n in range(int(p) - 1):
        t = t * (c + n) * z / ((b + n) * (n + 1))
        s = s + t
    return s


def truncated_coefficients_in_c(b, z, p):
    """Coefficients (highest power first) of the p-term truncation as a polynomial in c.

    ``np.polyval(truncated_coefficients_in_c(b, z, p), c)`` equals
    ``kummer_m_truncated(c, b, z, p)``; the degree is ``p - 1``.
    """
    if int(p) != p or p < 1:
        raise DomainError(f"term count p={p} must be a positive integer")
    _validate(b, z)
    coeffs = np.zeros(int(p))  # increasing powers of c
    pochhammer = np.array([1.0])  # (c)_n, increasing powers
    scale = 1.0  # z^n / ((b)_n n!)
    for n in range(int(p)):
        if n > 0:
            pochhammer = np.convolve(pochhammer, [n - 1.0, 1.0])
            scale *= z / ((b + n - 1) * n)
        coeffs[: pochhammer.size] += pochhammer * scale
    return coeffs[::-1].copy()
