"""Joint diagonalization of a 2x2 pivot pair.

Given the Hermitian pivot submatrices A^ (from F-column dot products) and B^
(from G-column dot products, unit diagonal after rescaling), a nonsingular
Z^ is computed so that Z^* B^ Z^ = I and Z^* A^ Z^ is diagonal.  The entries
of Z^ are assembled directly from cos/sin combinations; the underlying angles
are never materialized.

The real and the complex cases have separate formula sets, each with an
exception branch for the degenerate configuration where the generic tangent
expressions turn into 0/0.  A complex pivot whose off-diagonal entries are
both purely real is delegated to the real formulas, which the general complex
path reproduces exactly in that configuration.

Division by zero follows IEEE semantics throughout (+-1/0 and 1/inf are taken
at face value and never trapped).
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numba import njit

from ._fp import fma
from .dotprod import (_k_dot_cplx, _k_dot_cplx_comp, _k_dot_real,
                      _k_dot_real_comp, _k_norm_sq_cplx, _k_norm_sq_cplx_comp,
                      _k_norm_sq_real, _k_norm_sq_real_comp)
from .errors import RankError

EPS = 2.0 ** -52
_RSQRT2 = 1.0 / math.sqrt(2.0)


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass
class PivotPair2x2:
    """The 2x2 pivot matrices plus the diagonal rescaler applied to them."""

    a11: float
    a22: float
    a12: complex
    b11: float
    b22: float
    b12: complex
    d11: float = 1.0
    d22: float = 1.0


@dataclass
class TransformScalars:
    """Intermediate quantities of the transform computation."""

    x: float
    zeta: float
    t: float
    u: float = 0.0
    v: float = 0.0
    h: float = 0.0
    tau: float = 1.0
    tan2theta: Optional[float] = None
    cot2theta: Optional[float] = None
    tangamma: Optional[float] = None
    xi: Optional[float] = None
    eta: Optional[float] = None
    cosphi: float = 1.0
    cospsi: float = 1.0


@dataclass
class Transform2x2:
    """The completed transformation with its classification."""

    z11: complex
    z12: complex
    z21: complex
    z22: complex
    swapped: bool = False
    applied: bool = True
    is_big: bool = True
    diag_after: Optional[Tuple[float, float]] = None


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True, error_model="numpy")
def _k_rescale2(a11, a12r, a12i, a22, b11, b12r, b12i, b22):
    """Scale the pivot pair so the B^ diagonal is exactly unit."""
    d11 = 1.0
    d22 = 1.0
    if b11 != 1.0:
        a11 = a11 / b11
        d11 = 1.0 / math.sqrt(b11)
        a12r *= d11
        a12i *= d11
        b12r *= d11
        b12i *= d11
    if b22 != 1.0:
        a22 = a22 / b22
        d22 = 1.0 / math.sqrt(b22)
        a12r *= d22
        a12i *= d22
        b12r *= d22
        b12i *= d22
    return a11, a12r, a12i, a22, b12r, b12i, d11, d22


@njit(cache=True, nogil=True, error_model="numpy")
def _k_gate(a11, a12r, a12i, a22, b12r, b12i, epsn):
    """Relative orthogonality test; epsn is eps * sqrt(problem order)."""
    ok_a = math.hypot(a12r, a12i) < math.sqrt(a11) * math.sqrt(a22) * epsn
    ok_b = math.hypot(b12r, b12i) < epsn
    return ok_a and ok_b


@njit(cache=True, nogil=True, error_model="numpy")
def _k_cos_sin_from_tan(tg):
    """cos/sin from a tangent in (-pi/2, pi/2]; an infinite (or overflowing)
    tangent maps to cos 0 and sin of unit magnitude with the tangent's sign."""
    t2 = fma(tg, tg, 1.0)
    if np.isinf(t2) or np.isinf(tg):
        return 0.0, math.copysign(1.0, tg)
    c = 1.0 / math.sqrt(t2)
    return c, tg * c


@njit(cache=True, nogil=True, error_model="numpy")
def _k_transform_real(a11, a12, a22, x):
    """Real transform on a rescaled pivot.

    Returns (z11, z12, z21, z22, cosphi, cospsi, t, xi, eta, cot2t) where the
    z entries already carry the 1/t factor and cot2t is NaN on the exception
    branch (proportional pivot matrices).
    """
    t = math.sqrt(fma(-x, x, 1.0))
    num = t * (a22 - a11)
    den = fma(-(a11 + a22), x, 2.0 * a12)
    if num == 0.0 and den == 0.0:
        ax = abs(x)
        sp = 1.0 / math.sqrt(1.0 + ax)
        sm = 1.0 / math.sqrt(1.0 - ax)
        z11 = _RSQRT2 * sp
        z12 = -(_RSQRT2 * sm)
        z21 = _RSQRT2 * sp
        z22 = _RSQRT2 * sm
        return (z11, z12, z21, z22, z11 * t, z22 * t, t, 0.0, 0.0, np.nan)
    sqp = math.sqrt(1.0 + x)
    sqm = math.sqrt(1.0 - x)
    xi = x / (sqp + sqm)
    eta = x / ((1.0 + sqp) * (1.0 + sqm))
    ct2 = num / den
    tanth = math.copysign(1.0, ct2) / (abs(ct2) + math.sqrt(fma(ct2, ct2, 1.0)))
    cth, sth = _k_cos_sin_from_tan(tanth)
    cosphi = fma(xi, fma(-eta, cth, sth), cth)
    cospsi = fma(-xi, fma(eta, cth, sth), cth)
    sinphi = fma(-xi, fma(eta, sth, cth), sth)
    sinpsi = fma(xi, fma(-eta, sth, cth), sth)
    return (cosphi / t, sinphi / t, -(sinpsi / t), cospsi / t,
            cosphi, cospsi, t, xi, eta, ct2)


@njit(cache=True, nogil=True, error_model="numpy")
def _k_transform_cplx(a11, a12r, a12i, a22, b12r, b12i):
    """Complex transform on a rescaled pivot.

    Returns (z11, z12r, z12i, z21r, z21i, z22, cosphi, cospsi, t, x, zr, zi,
    u, v, h) with real diagonal entries z11, z22.  Purely real pivots are
    delegated to the real formulas.
    """
    if a12i == 0.0 and b12i == 0.0:
        z11, z12, z21, z22, cphi, cpsi, t, _, _, _ = \
            _k_transform_real(a11, a12r, a22, b12r)
        x = b12r
        return (z11, z12, 0.0, z21, 0.0, z22, cphi, cpsi, t,
                x, 1.0, 0.0, a12r, 0.0, a22 - a11)
    x = math.hypot(b12r, b12i)
    if x == 0.0:
        czr = 1.0
        czi = 0.0
    else:
        czr = b12r / x
        czi = b12i / x
    # z = conj(e^{i zeta}) * a12'
    u = fma(a12r, czr, a12i * czi)
    v = fma(a12i, czr, -(a12r * czi))
    h = a22 - a11
    t = math.sqrt(fma(-x, x, 1.0))
    if v == 0.0 and h == 0.0:
        sp = 1.0 / math.sqrt(1.0 + x)
        sm = 1.0 / math.sqrt(1.0 - x)
        z11 = _RSQRT2 * sp
        z22 = _RSQRT2 * sm
        w = _RSQRT2 * sm
        z12r = -(w * czr)
        z12i = -(w * czi)
        w = _RSQRT2 * sp
        z21r = w * czr
        z21i = -(w * czi)
        return (z11, z12r, z12i, z21r, z21i, z22, z11 * t, z22 * t, t,
                x, czr, czi, u, v, h)
    tau = math.copysign(1.0, h)
    num = fma(-(a11 + a22), x, 2.0 * u)
    den = t * math.hypot(h, 2.0 * v)
    t2t = (tau * num) / den
    tg = (2.0 * v) / h
    c2t, s2t = _k_cos_sin_from_tan(t2t)
    cg, sg = _k_cos_sin_from_tan(tg)
    tcg = t * cg
    cosphi = math.sqrt(fma(tcg, c2t, fma(x, s2t, 1.0))) * _RSQRT2
    cospsi = math.sqrt(fma(tcg, c2t, fma(-x, s2t, 1.0))) * _RSQRT2
    tsg = t * sg
    wi = tsg * c2t
    # e^{i alpha} sin(phi) = e^{i zeta} ((s2t - x) + i t sg c2t) / (2 cos psi)
    d = 2.0 * cospsi
    er = (s2t - x) / d
    ei = wi / d
    z12r = fma(czr, er, -(czi * ei))
    z12i = fma(czr, ei, czi * er)
    # e^{-i beta} sin(psi) = e^{-i zeta} ((s2t + x) - i t sg c2t) / (2 cos phi)
    d = 2.0 * cosphi
    fr = (s2t + x) / d
    fi = -wi / d
    br = fma(czr, fr, czi * fi)
    bi = fma(czr, fi, -(czi * fr))
    return (cosphi / t, z12r / t, z12i / t, -(br / t), -(bi / t), cospsi / t,
            cosphi, cospsi, t, x, czr, czi, u, v, h)


@njit(cache=True, nogil=True, error_model="numpy")
def _k_diag_after_real(z11, z12, z21, z22, a11, a12, a22):
    """Transformed diagonal of the A^ pivot from the pre-rescaler entries."""
    a11pp = z11 * z11 * a11 + 2.0 * (z11 * z21) * a12 + z21 * z21 * a22
    a22pp = z12 * z12 * a11 + 2.0 * (z22 * z12) * a12 + z22 * z22 * a22
    return a11pp, a22pp


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

def _col_parts(c):
    z = np.asarray(c)
    if np.iscomplexobj(z):
        return (np.ascontiguousarray(z.real.astype(np.float64)),
                np.ascontiguousarray(z.imag.astype(np.float64)), True)
    return np.ascontiguousarray(z.astype(np.float64)), None, False


def form_pivot(fi, fj, gi, gj, compensated=False):
    """Build the pivot pair from two F columns and two G columns."""
    fir, fii, cplx = _col_parts(fi)
    fjr, fji, _ = _col_parts(fj)
    gir, gii, _ = _col_parts(gi)
    gjr, gji, _ = _col_parts(gj)
    if cplx:
        nrm = _k_norm_sq_cplx_comp if compensated else _k_norm_sq_cplx
        dot = _k_dot_cplx_comp if compensated else _k_dot_cplx
        a11 = nrm(fir, fii)
        a22 = nrm(fjr, fji)
        a12 = complex(*dot(fir, fii, fjr, fji, True))
        b11 = nrm(gir, gii)
        b22 = nrm(gjr, gji)
        b12 = complex(*dot(gir, gii, gjr, gji, True))
    else:
        nrm = _k_norm_sq_real_comp if compensated else _k_norm_sq_real
        dot = _k_dot_real_comp if compensated else _k_dot_real
        a11 = nrm(fir)
        a22 = nrm(fjr)
        a12 = complex(dot(fir, fjr), 0.0)
        b11 = nrm(gir)
        b22 = nrm(gjr)
        b12 = complex(dot(gir, gjr), 0.0)
    if not (a11 > 0.0 and a22 > 0.0 and b11 > 0.0 and b22 > 0.0):
        raise RankError("zero pivot column: the pair is not of full column rank")
    return PivotPair2x2(a11, a22, a12, b11, b22, b12)


def rescale_pivot(p):
    """Return the pivot pair scaled to a unit B^ diagonal."""
    a11, a12r, a12i, a22, b12r, b12i, d11, d22 = _k_rescale2(
        p.a11, p.a12.real, p.a12.imag, p.a22, p.b11, p.b12.real, p.b12.imag, p.b22)
    return PivotPair2x2(a11, a22, complex(a12r, a12i), 1.0, 1.0,
                        complex(b12r, b12i), d11, d22)


def relatively_orthogonal(p, n, eps=EPS):
    """True when both pivot columns pass the relative orthogonality test at
    threshold eps * sqrt(n)."""
    epsn = eps * math.sqrt(n)
    return bool(_k_gate(p.a11, p.a12.real, p.a12.imag, p.a22,
                        p.b12.real, p.b12.imag, epsn))


def transform_real(p):
    """Real transform; the pivot must be rescaled and must have failed the
    orthogonality gate."""
    z11, z12, z21, z22, cphi, cpsi, t, xi, eta, ct2 = _k_transform_real(
        p.a11, p.a12.real, p.a22, p.b12.real)
    zp = np.array([[z11, z12], [z21, z22]], dtype=np.float64)
    sc = TransformScalars(x=p.b12.real, zeta=0.0, t=t, h=p.a22 - p.a11,
                          tau=math.copysign(1.0, p.a22 - p.a11),
                          cot2theta=ct2, xi=xi, eta=eta,
                          cosphi=cphi, cospsi=cpsi)
    return zp, sc


def transform_complex(p):
    """Complex transform; the pivot must be rescaled and must have failed the
    orthogonality gate."""
    (z11, z12r, z12i, z21r, z21i, z22, cphi, cpsi, t,
     x, czr, czi, u, v, h) = _k_transform_cplx(
        p.a11, p.a12.real, p.a12.imag, p.a22, p.b12.real, p.b12.imag)
    zp = np.array([[complex(z11, 0.0), complex(z12r, z12i)],
                   [complex(z21r, z21i), complex(z22, 0.0)]], dtype=np.complex128)
    zeta = math.atan2(p.b12.imag, p.b12.real) if p.b12 != 0 else 0.0
    sc = TransformScalars(x=x, zeta=zeta, t=t, u=u, v=v, h=h,
                          tau=math.copysign(1.0, h),
                          tangamma=(2.0 * v) / h if h != 0.0 else math.inf,
                          cosphi=cphi, cospsi=cpsi)
    return zp, sc


def finalize_transform(zp, p, sort=True, criterion="C1", scalars=None):
    """Complete a transform: apply the pivot rescaler rows, classify it as
    big or small, and decide the sorting swap.

    When ``zp`` is None the orthogonality gate has passed and the result is
    the identity or, with sorting and a11' < a22', the column swap; the pivot
    rescaler is not applied in that case.  For an applied complex transform
    with sorting the swap decision needs the transformed column norms, which
    only the column-update loop knows; ``diag_after`` is then None and the
    caller finishes the decision.
    """
    if zp is None:
        if sort and p.a11 < p.a22:
            return Transform2x2(0j, 1 + 0j, 1 + 0j, 0j, swapped=True,
                                applied=False, is_big=False,
                                diag_after=(p.a22, p.a11))
        return Transform2x2(1 + 0j, 0j, 0j, 1 + 0j, swapped=False,
                            applied=False, is_big=False,
                            diag_after=(p.a11, p.a22))
    z = np.asarray(zp, dtype=np.complex128)
    z11, z12, z21, z22 = z[0, 0], z[0, 1], z[1, 0], z[1, 1]
    if scalars is not None:
        t = scalars.t
        cphi, cpsi = scalars.cosphi, scalars.cospsi
    else:
        x = abs(p.b12)
        t = math.sqrt(fma(-x, x, 1.0))
        cphi, cpsi = z11.real * t, z22.real * t
    if criterion == "C2":
        is_big = not (cphi == 1.0 and cpsi == 1.0)
    else:
        is_big = not (z11.real == 1.0 and z22.real == 1.0)
    diag_after = None
    swapped = False
    real_case = (z.imag == 0.0).all() and p.a12.imag == 0.0
    if real_case:
        a1, a2 = _k_diag_after_real(z11.real, z12.real, z21.real, z22.real,
                                    p.a11, p.a12.real, p.a22)
        diag_after = (a1, a2)
        swapped = bool(sort and a1 < a2)
    z11, z12 = z11 * p.d11, z12 * p.d11
    z21, z22 = z21 * p.d22, z22 * p.d22
    if swapped:
        z11, z12 = z12, z11
        z21, z22 = z22, z21
        diag_after = (diag_after[1], diag_after[0])
    return Transform2x2(z11, z12, z21, z22, swapped=swapped, applied=True,
                        is_big=is_big, diag_after=diag_after)
