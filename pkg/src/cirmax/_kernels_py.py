"""Pure-Python fallback for the Kummer-series kernels.

Every series routine returns ``(log_sum, log_max, n_terms, status)``:

* ``log_sum`` -- complex logarithm of the partial sum (real part ``log|M|``)
* ``log_max`` -- log of the largest term magnitude, used by the caller to
  estimate cancellation
* ``status`` -- 1 converged, 0 term cap reached, -1 non-finite arithmetic

Accumulation is in double precision with explicit rescaling, so the range
matches the compiled kernel while the mantissa is 11 bits shorter.
"""

import math

import numpy as np

NAME = "python"
FAST_EPS = float(np.finfo(np.float64).eps)
HAS_WIDE = False
WIDE_EPS = FAST_EPS

_BIG = 1e250
_LOG_BIG = math.log(_BIG)


def series_fast(c, b, z, tol, max_terms):
    c = complex(c)
    t = 1 + 0j
    s = 1 + 0j
    scale = 0.0
    log_max = 0.0
    small = 0
    n = 0
    status = 0
    while n < max_terms:
        t *= (c + n) * (z / ((b + n) * (n + 1)))
        n += 1
        s += t
        at = abs(t)
        if not (math.isfinite(at) and math.isfinite(s.real) and math.isfinite(s.imag)):
            status = -1
            break
        if abs(s) > _BIG or at > _BIG:
            t /= _BIG
            s /= _BIG
            scale += _LOG_BIG
            at = abs(t)
        if at > 0.0:
            log_max = max(log_max, math.log(at) + scale)
        if at <= tol * abs(s):
            small += 1
            if small == 3:
                status = 1
                break
        else:
            small = 0
    a = abs(s)
    log_abs = math.log(a) + scale if a > 0.0 else -math.inf
    return complex(log_abs, math.atan2(s.imag, s.real)), log_max, n, status


def series_wide(c, b, z, tol, max_terms):
    raise NotImplementedError("no extended-precision accumulator in the fallback")


def series_fast_vec(c, b, z, tol, max_terms):
    z = np.ascontiguousarray(z, dtype=np.float64)
    size = z.size
    c = complex(c)
    t = np.ones(size, dtype=np.complex128)
    s = np.ones(size, dtype=np.complex128)
    scale = np.zeros(size)
    log_max = np.zeros(size)
    small = np.zeros(size, dtype=np.int64)
    n_terms = np.zeros(size, dtype=np.int64)
    status = np.zeros(size, dtype=np.int32)
    active = np.arange(size)
    n = 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        while active.size and n < max_terms:
            ta = t[active] * ((c + n) * (z[active] / ((b + n) * (n + 1))))
            sa = s[active] + ta
            n += 1
            at = np.abs(ta)
            asum = np.abs(sa)
            big = (at > _BIG) | (asum > _BIG)
            if big.any():
                ta[big] /= _BIG
                sa[big] /= _BIG
                scale[active[big]] += _LOG_BIG
                at = np.abs(ta)
                asum = np.abs(sa)
            t[active] = ta
            s[active] = sa
            pos = at > 0.0
            if pos.any():
                idx = active[pos]
                log_max[idx] = np.maximum(log_max[idx], np.log(at[pos]) + scale[idx])
            bad = ~(np.isfinite(at) & np.isfinite(asum))
            hit = at <= tol * asum
            small[active] = np.where(hit, small[active] + 1, 0)
            done = (small[active] >= 3) | bad
            if done.any():
                fin = active[done]
                n_terms[fin] = n
                status[fin] = np.where(bad[done], -1, 1)
                active = active[~done]
        n_terms[active] = n
        log_sum = np.log(np.abs(s)) + scale + 1j * np.angle(s)
    return log_sum, log_max, n_terms, status
