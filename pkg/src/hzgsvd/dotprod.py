"""Ordinary and compensated dot products with a deterministic tree reduction.

Every summation the solver performs is routed through :func:`tree_reduce`, a
pairwise binary tree over the input padded to a power of two with +0.0.  The
reduction order is a pure function of the vector length, never of scheduling,
which is what makes repeated runs (and runs on task pools of any size)
bitwise identical.

Complex values are handled as split real/imaginary parts.  An elementwise
complex product uses the fused form: each part costs one ordinary product and
one fused multiply-add, so it rounds twice instead of three times.

Compensated variants split every elementwise product error-free into the
rounded product c and the exact residual d = fma(a, b, -c), reduce the c and d
parts separately, and recombine: for a real sum s = e + c, and per complex
part s = (e + min(c_r, c_i)) + max(c_r, c_i) with e the total of the residual
reductions.  Unlike a directed-rounding formulation the residual may be
negative here; the accumulator structure is otherwise the same.

The c-part reduction additionally extracts its own rounding errors: each tree
addition is an error-free two_sum whose principal value is exactly what the
plain tree computes, and the error terms are folded into e.  Without this the
summation rounding alone reaches a few ulp on benign vectors (and far more
under cancellation), which would defeat the point of compensating; with it
the result stays within 1 ulp of the exact dot product on the random test
corpora.  For vectors whose products and partial sums are all exactly
representable, every residual is zero and the compensated result is bitwise
the ordinary one.

The ``_s``-suffixed kernels take a caller-owned scratch buffer (capacity the
next power of two of the vector length, tail zeroed by the kernel) so the
solver's hot loops run without heap traffic; they compute exactly the same
values as the public entry points.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from ._fp import fma, verify_fma

verify_fma()


@dataclass
class CompensatedAccumulator:
    """Principal and error partial sums of a compensated reduction.

    For real inputs the imaginary-side accumulators stay zero.  ``combined``
    is the simplified recombination: the errors are added first, then the
    smaller principal sum, then the larger one.
    """

    c_r: float = 0.0
    c_i: float = 0.0
    d_r: float = 0.0
    d_i: float = 0.0

    def combined(self):
        e = self.d_r + self.d_i
        if self.c_r <= self.c_i:
            return (e + self.c_r) + self.c_i
        return (e + self.c_i) + self.c_r


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _k_pow2(n):
    m = 1
    while m < n:
        m *= 2
    return m


@njit(cache=True, nogil=True)
def _k_tree(buf, n):
    """In-place pairwise tree over buf[:pow2(n)]; the caller filled buf[:n]
    and this kernel zeroes the padding tail."""
    m = _k_pow2(n)
    for i in range(n, m):
        buf[i] = 0.0
    while m > 1:
        h = m // 2
        for i in range(h):
            buf[i] = buf[2 * i] + buf[2 * i + 1]
        m = h
    return buf[0]


@njit(cache=True, nogil=True)
def _k_tree_reduce(x):
    n = x.shape[0]
    buf = np.empty(_k_pow2(n))
    for i in range(n):
        buf[i] = x[i]
    return _k_tree(buf, n)


@njit(cache=True, nogil=True)
def _k_tree_comp(buf, n):
    """Tree reduction with two_sum error extraction; the principal result is
    bitwise that of _k_tree, the accumulated error comes back alongside."""
    m = _k_pow2(n)
    for i in range(n, m):
        buf[i] = 0.0
    err = 0.0
    while m > 1:
        h = m // 2
        for i in range(h):
            a = buf[2 * i]
            b = buf[2 * i + 1]
            s = a + b
            ap = s - b
            bp = s - ap
            err += (a - ap) + (b - bp)
            buf[i] = s
        m = h
    return buf[0], err


@njit(cache=True, nogil=True)
def _k_dot_real_s(a, b, buf):
    n = a.shape[0]
    for t in range(n):
        buf[t] = a[t] * b[t]
    return _k_tree(buf, n)


@njit(cache=True, nogil=True)
def _k_dot_real_comp_s(a, b, buf):
    n = a.shape[0]
    for t in range(n):
        p = a[t] * b[t]
        buf[t] = fma(a[t], b[t], -p)
    d = _k_tree(buf, n)
    for t in range(n):
        buf[t] = a[t] * b[t]
    c, e = _k_tree_comp(buf, n)
    return (d + e) + c


@njit(cache=True, nogil=True)
def _k_dot_cplx_s(ar, ai, br, bi, conj_first, buf):
    n = ar.shape[0]
    s = -1.0 if conj_first else 1.0
    for t in range(n):
        buf[t] = fma(ar[t], br[t], -((s * ai[t]) * bi[t]))
    re = _k_tree(buf, n)
    for t in range(n):
        buf[t] = fma(ar[t], bi[t], (s * ai[t]) * br[t])
    return re, _k_tree(buf, n)


@njit(cache=True, nogil=True)
def _k_comp_combine(cr, ci, dr, di):
    e = dr + di
    if cr <= ci:
        return (e + cr) + ci
    return (e + ci) + cr


@njit(cache=True, nogil=True)
def _k_dot_cplx_comp_s(ar, ai, br, bi, conj_first, buf):
    # conjugated: re = sum ar*br + sum ai*bi,  im = sum ar*bi - sum ai*br
    # plain:      re = sum ar*br - sum ai*bi,  im = sum ar*bi + sum ai*br
    n = ar.shape[0]
    sv = 1.0 if conj_first else -1.0
    sq = -1.0 if conj_first else 1.0
    for t in range(n):
        buf[t] = ar[t] * br[t]
    cu, eu = _k_tree_comp(buf, n)
    for t in range(n):
        p = ar[t] * br[t]
        buf[t] = fma(ar[t], br[t], -p)
    du = _k_tree(buf, n)
    for t in range(n):
        buf[t] = sv * (ai[t] * bi[t])
    cv, ev = _k_tree_comp(buf, n)
    for t in range(n):
        p = ai[t] * bi[t]
        buf[t] = sv * fma(ai[t], bi[t], -p)
    dv = _k_tree(buf, n)
    re = _k_comp_combine(cu, cv, du + eu, dv + ev)
    for t in range(n):
        buf[t] = ar[t] * bi[t]
    cp, ep = _k_tree_comp(buf, n)
    for t in range(n):
        p = ar[t] * bi[t]
        buf[t] = fma(ar[t], bi[t], -p)
    dp = _k_tree(buf, n)
    for t in range(n):
        buf[t] = sq * (ai[t] * br[t])
    cq, eq = _k_tree_comp(buf, n)
    for t in range(n):
        p = ai[t] * br[t]
        buf[t] = sq * fma(ai[t], br[t], -p)
    dq = _k_tree(buf, n)
    im = _k_comp_combine(cp, cq, dp + ep, dq + eq)
    return re, im


@njit(cache=True, nogil=True)
def _k_norm_sq_real_s(v, buf):
    n = v.shape[0]
    for t in range(n):
        buf[t] = v[t] * v[t]
    return _k_tree(buf, n)


@njit(cache=True, nogil=True)
def _k_norm_sq_real_comp_s(v, buf):
    n = v.shape[0]
    for t in range(n):
        p = v[t] * v[t]
        buf[t] = fma(v[t], v[t], -p)
    d = _k_tree(buf, n)
    for t in range(n):
        buf[t] = v[t] * v[t]
    c, e = _k_tree_comp(buf, n)
    return (d + e) + c


@njit(cache=True, nogil=True)
def _k_norm_sq_cplx_s(vr, vi, buf):
    n = vr.shape[0]
    for t in range(n):
        buf[t] = fma(vi[t], vi[t], vr[t] * vr[t])
    return _k_tree(buf, n)


@njit(cache=True, nogil=True)
def _k_norm_sq_cplx_comp_s(vr, vi, buf):
    n = vr.shape[0]
    for t in range(n):
        buf[t] = vr[t] * vr[t]
    cr, er = _k_tree_comp(buf, n)
    for t in range(n):
        p = vr[t] * vr[t]
        buf[t] = fma(vr[t], vr[t], -p)
    dr = _k_tree(buf, n)
    for t in range(n):
        buf[t] = vi[t] * vi[t]
    ci, ei = _k_tree_comp(buf, n)
    for t in range(n):
        p = vi[t] * vi[t]
        buf[t] = fma(vi[t], vi[t], -p)
    di = _k_tree(buf, n)
    return _k_comp_combine(cr, ci, dr + er, di + ei)


# allocating wrappers (single source of truth is the _s kernel)

@njit(cache=True, nogil=True)
def _k_dot_real(a, b):
    return _k_dot_real_s(a, b, np.empty(_k_pow2(a.shape[0])))


@njit(cache=True, nogil=True)
def _k_dot_real_comp(a, b):
    return _k_dot_real_comp_s(a, b, np.empty(_k_pow2(a.shape[0])))


@njit(cache=True, nogil=True)
def _k_dot_cplx(ar, ai, br, bi, conj_first):
    return _k_dot_cplx_s(ar, ai, br, bi, conj_first, np.empty(_k_pow2(ar.shape[0])))


@njit(cache=True, nogil=True)
def _k_dot_cplx_comp(ar, ai, br, bi, conj_first):
    return _k_dot_cplx_comp_s(ar, ai, br, bi, conj_first,
                              np.empty(_k_pow2(ar.shape[0])))


@njit(cache=True, nogil=True)
def _k_norm_sq_real(v):
    return _k_norm_sq_real_s(v, np.empty(_k_pow2(v.shape[0])))


@njit(cache=True, nogil=True)
def _k_norm_sq_real_comp(v):
    return _k_norm_sq_real_comp_s(v, np.empty(_k_pow2(v.shape[0])))


@njit(cache=True, nogil=True)
def _k_norm_sq_cplx(vr, vi):
    return _k_norm_sq_cplx_s(vr, vi, np.empty(_k_pow2(vr.shape[0])))


@njit(cache=True, nogil=True)
def _k_norm_sq_cplx_comp(vr, vi):
    return _k_norm_sq_cplx_comp_s(vr, vi, np.empty(_k_pow2(vr.shape[0])))


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

def _as_f8(a):
    return np.ascontiguousarray(np.asarray(a, dtype=np.float64))


def _split(a):
    z = np.asarray(a, dtype=np.complex128)
    return (np.ascontiguousarray(z.real.astype(np.float64)),
            np.ascontiguousarray(z.imag.astype(np.float64)))


def tree_reduce(values):
    """Sum a vector through the fixed-shape pairwise tree."""
    v = _as_f8(values)
    if v.size < 1:
        raise ValueError("tree_reduce needs at least one value")
    return float(_k_tree_reduce(v))


def dot_ordinary(a, b, field="real", conjugate_first=True):
    """Dot product with tree-reduced partial sums.

    For complex inputs the first argument is conjugated elementwise when
    ``conjugate_first`` is set, and each elementwise product uses the fused
    two-rounding form.
    """
    if len(a) != len(b):
        raise ValueError("dot_ordinary: length mismatch (%d vs %d)" % (len(a), len(b)))
    if len(a) < 1:
        raise ValueError("dot_ordinary: empty vectors")
    if field == "real":
        return float(_k_dot_real(_as_f8(a), _as_f8(b)))
    ar, ai = _split(a)
    br, bi = _split(b)
    re, im = _k_dot_cplx(ar, ai, br, bi, bool(conjugate_first))
    return complex(re, im)


def dot_compensated(a, b, field="real", conjugate_first=True):
    """Dot product with error-free product splitting and two accumulators."""
    if len(a) != len(b):
        raise ValueError("dot_compensated: length mismatch (%d vs %d)" % (len(a), len(b)))
    if len(a) < 1:
        raise ValueError("dot_compensated: empty vectors")
    if field == "real":
        return float(_k_dot_real_comp(_as_f8(a), _as_f8(b)))
    ar, ai = _split(a)
    br, bi = _split(b)
    re, im = _k_dot_cplx_comp(ar, ai, br, bi, bool(conjugate_first))
    return complex(re, im)


def norm_sq(v, field="real", compensated=False):
    """Squared Euclidean norm; overflow yields +inf and is not trapped."""
    if len(v) < 1:
        raise ValueError("norm_sq: empty vector")
    if field == "real":
        x = _as_f8(v)
        return float(_k_norm_sq_real_comp(x) if compensated else _k_norm_sq_real(x))
    vr, vi = _split(v)
    if compensated:
        return float(_k_norm_sq_cplx_comp(vr, vi))
    return float(_k_norm_sq_cplx(vr, vi))
