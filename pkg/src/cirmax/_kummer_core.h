/* Power-series accumulation for Kummer's M(c, b, z), complex c, real b and z.
 *
 * Two accumulators share one loop body: long double (x87 extended, 64-bit
 * mantissa) and __float128 (113-bit mantissa, soft float).  Both have an
 * exponent range of roughly 1e+-4932, so no rescaling is needed for the
 * arguments this package produces (log|M| well below 11000).
 *
 * Stopping rule: |t_n| <= tol * |partial sum| for three consecutive terms.
 */
#ifndef CIRMAX_KUMMER_CORE_H
#define CIRMAX_KUMMER_CORE_H

#include <math.h>

typedef struct {
    double log_abs;   /* log |sum| */
    double arg;       /* arg(sum) in (-pi, pi] */
    double log_max;   /* log of the largest |term| (term 0 included) */
    long n_terms;
    int converged;    /* 1 converged, 0 term cap hit, -1 non-finite */
} kummer_result;

static kummer_result kummer_series_ld(double cr, double ci, double b,
                                      double z, double tol, long max_terms)
{
    kummer_result out;
    long double tr = 1.0L, ti = 0.0L, sr = 1.0L, si = 0.0L;
    long double lcr = cr, lci = ci, lb = b, lz = z;
    long double amax = 1.0L, at, as;
    long n = 0;
    int small = 0;

    out.converged = 0;
    while (n < max_terms) {
        long double f = lz / ((lb + (long double)n) * (long double)(n + 1));
        long double ar = lcr + (long double)n;
        long double nr = (tr * ar - ti * lci) * f;
        long double ni = (tr * lci + ti * ar) * f;
        tr = nr;
        ti = ni;
        n++;
        sr += tr;
        si += ti;
        at = hypotl(tr, ti);
        as = hypotl(sr, si);
        if (!isfinite(at) || !isfinite(as)) {
            out.converged = -1;
            break;
        }
        if (at > amax)
            amax = at;
        if (at <= tol * as) {
            if (++small == 3) {
                out.converged = 1;
                break;
            }
        } else {
            small = 0;
        }
    }
    as = hypotl(sr, si);
    out.log_abs = (double)logl(as);
    out.arg = (double)atan2l(si, sr);
    out.log_max = (double)logl(amax);
    out.n_terms = n;
    return out;
}

#if defined(__SIZEOF_FLOAT128__)
#define CIRMAX_HAVE_FLOAT128 1

static long double q_abs2(__float128 x, __float128 y)
{
    /* magnitude only steers the stopping rule; long double is plenty */
    long double ax = (long double)(x < 0 ? -x : x);
    long double ay = (long double)(y < 0 ? -y : y);
    return hypotl(ax, ay);
}

static kummer_result kummer_series_q(double cr, double ci, double b,
                                     double z, double tol, long max_terms)
{
    kummer_result out;
    __float128 tr = 1, ti = 0, sr = 1, si = 0;
    __float128 qcr = cr, qci = ci, qb = b, qz = z;
    long double amax = 1.0L, at, as;
    long n = 0;
    int small = 0;

    out.converged = 0;
    while (n < max_terms) {
        __float128 f = qz / ((qb + (__float128)n) * (__float128)(n + 1));
        __float128 ar = qcr + (__float128)n;
        __float128 nr = (tr * ar - ti * qci) * f;
        __float128 ni = (tr * qci + ti * ar) * f;
        tr = nr;
        ti = ni;
        n++;
        sr += tr;
        si += ti;
        at = q_abs2(tr, ti);
        as = q_abs2(sr, si);
        if (!isfinite(at) || !isfinite(as)) {
            out.converged = -1;
            break;
        }
        if (at > amax)
            amax = at;
        if (at <= tol * as) {
            if (++small == 3) {
                out.converged = 1;
                break;
            }
        } else {
            small = 0;
        }
    }
    /* the sum is settled; 64-bit mantissa suffices for log and arg */
    {
        long double lr = (long double)sr, li = (long double)si;
        out.log_abs = (double)logl(hypotl(lr, li));
        out.arg = (double)atan2l(li, lr);
    }
    out.log_max = (double)logl(amax);
    out.n_terms = n;
    return out;
}
#else
#define CIRMAX_HAVE_FLOAT128 0

static kummer_result kummer_series_q(double cr, double ci, double b,
                                     double z, double tol, long max_terms)
{
    kummer_result out = kummer_series_ld(cr, ci, b, z, tol, max_terms);
    return out;
}
#endif

#endif /* CIRMAX_KUMMER_CORE_H */
