"""The pointwise (non-blocked) one-sided solver.

A sweep walks the parallel strategy table; each step's pivot pairs touch
disjoint columns, so their processing order cannot change the result.  Per
pivot the 2x2 pivot matrices are formed from column dot products, screened by
the relative orthogonality gate, transformed, and the two columns of F, G, and
Z are postmultiplied in the fused form new_i = zfma(y_j, z21, y_i * z11) with
real diagonal entries.

The sweep loop halts on the first sweep that applies no transformation of any
class, or at the sweep cap (30 for full-block use, 1 for block-oriented).
When running as the inner level of the blocked solver, the accumulated Z is
finished with the theta rescaling: each column is scaled by
1/sqrt(|f_j|^2 + |g_j|^2), which bounds the growth of the accumulated
transforms and keeps the implicit column pencils normalized.
"""

from dataclasses import dataclass, field as dc_field

import numpy as np
from numba import njit

from ._fp import fma
from .core import GsvdResult, MatrixPlanePair
from .dotprod import (_k_dot_cplx_comp_s, _k_dot_cplx_s, _k_dot_real_comp_s,
                      _k_dot_real_s, _k_norm_sq_cplx_comp_s, _k_norm_sq_cplx_s,
                      _k_norm_sq_real_comp_s, _k_norm_sq_real_s, _k_pow2)
from .errors import RankError
from .kernel2x2 import EPS, _k_gate, _k_rescale2, _k_transform_cplx, \
    _k_transform_real, _k_diag_after_real
from .strategies import gen_table

import math


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass
class SolverConfig:
    """Solver variant selection.

    variant_id decodes as: convergence criterion C1 for ids < 4 and C2
    otherwise; ids 0, 1, 4, 5 prescale the columns once (unit G column norms)
    while 2, 3, 6, 7 rescale each pivot pair on the fly; odd ids use the
    compensated dot products.
    """

    variant_id: int = 0
    outer_kind: str = "me"
    inner_kind: str = "me"
    blocking: str = "fb"
    sorting: bool = True
    max_inner_sweeps: int = 0
    max_outer_sweeps: int = 30
    block_width: int = 8
    gate_eps: float = EPS
    fallback_qr: bool = True
    shorten: str = "grammian"
    pool: int = 1
    criterion: str = dc_field(init=False, default="C1")
    prescale: bool = dc_field(init=False, default=True)
    compensated: bool = dc_field(init=False, default=False)

    def __post_init__(self):
        if self.variant_id not in range(8):
            raise ValueError("variant_id must be 0..7")
        if self.blocking not in ("fb", "bo"):
            raise ValueError("blocking must be fb or bo")
        if self.outer_kind not in ("me", "mm") or self.inner_kind not in ("me", "mm"):
            raise ValueError("strategy kinds must be me or mm")
        if self.shorten not in ("grammian", "qr"):
            raise ValueError("shorten must be grammian or qr")
        if self.block_width < 1:
            raise ValueError("block width must be at least 1")
        self.criterion = "C1" if self.variant_id < 4 else "C2"
        self.prescale = self.variant_id in (0, 1, 4, 5)
        self.compensated = self.variant_id % 2 == 1
        if self.max_inner_sweeps <= 0:
            self.max_inner_sweeps = 30 if self.blocking == "fb" else 1


@dataclass
class SweepStats:
    """Applied-transformation counters."""

    total: int = 0
    big: int = 0

    def __post_init__(self):
        if self.big > self.total:
            raise ValueError("big count cannot exceed the total")


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True, error_model="numpy")
def _k_col_norm(Yr, Yi, j, is_cplx, comp, buf):
    if is_cplx:
        if comp:
            return _k_norm_sq_cplx_comp_s(Yr[:, j], Yi[:, j], buf)
        return _k_norm_sq_cplx_s(Yr[:, j], Yi[:, j], buf)
    if comp:
        return _k_norm_sq_real_comp_s(Yr[:, j], buf)
    return _k_norm_sq_real_s(Yr[:, j], buf)


@njit(cache=True, nogil=True, error_model="numpy")
def _k_col_dot(Yr, Yi, i, j, is_cplx, comp, buf):
    if is_cplx:
        if comp:
            return _k_dot_cplx_comp_s(Yr[:, i], Yi[:, i], Yr[:, j], Yi[:, j],
                                      True, buf)
        return _k_dot_cplx_s(Yr[:, i], Yi[:, i], Yr[:, j], Yi[:, j], True, buf)
    if comp:
        return _k_dot_real_comp_s(Yr[:, i], Yr[:, j], buf), 0.0
    return _k_dot_real_s(Yr[:, i], Yr[:, j], buf), 0.0


@njit(cache=True, nogil=True, error_model="numpy")
def _k_swap_cols(Yr, Yi, i, j, is_cplx):
    m = Yr.shape[0]
    for r in range(m):
        tmp = Yr[r, i]
        Yr[r, i] = Yr[r, j]
        Yr[r, j] = tmp
        if is_cplx:
            tmp = Yi[r, i]
            Yi[r, i] = Yi[r, j]
            Yi[r, j] = tmp


@njit(cache=True, nogil=True, error_model="numpy")
def _k_update_cols(Yr, Yi, i, j, z11, z12r, z12i, z21r, z21i, z22, is_cplx):
    """Postmultiply columns (i, j) by the 2x2 transform (real diagonal)."""
    m = Yr.shape[0]
    for r in range(m):
        yir = Yr[r, i]
        yjr = Yr[r, j]
        if is_cplx:
            yii = Yi[r, i]
            yji = Yi[r, j]
            nir = fma(yjr, z21r, fma(-yji, z21i, yir * z11))
            nii = fma(yjr, z21i, fma(yji, z21r, yii * z11))
            njr = fma(yir, z12r, fma(-yii, z12i, yjr * z22))
            nji = fma(yir, z12i, fma(yii, z12r, yji * z22))
            Yr[r, i] = nir
            Yi[r, i] = nii
            Yr[r, j] = njr
            Yi[r, j] = nji
        else:
            ni = fma(yjr, z21r, yir * z11)
            nj = fma(yir, z12r, yjr * z22)
            Yr[r, i] = ni
            Yr[r, j] = nj


@njit(cache=True, nogil=True, error_model="numpy")
def _k_process_pivot(Fr, Fi, Gr, Gi, Zr, Zi, i, j, is_cplx, per_step_rescale,
                     comp, crit_c2, sort, epsn, buf):
    """One pivot: form, gate, transform, update.  Returns (applied, big, bad)."""
    a11 = _k_col_norm(Fr, Fi, i, is_cplx, comp, buf)
    a22 = _k_col_norm(Fr, Fi, j, is_cplx, comp, buf)
    a12r, a12i = _k_col_dot(Fr, Fi, i, j, is_cplx, comp, buf)
    b11 = _k_col_norm(Gr, Gi, i, is_cplx, comp, buf)
    b22 = _k_col_norm(Gr, Gi, j, is_cplx, comp, buf)
    b12r, b12i = _k_col_dot(Gr, Gi, i, j, is_cplx, comp, buf)
    if not (a11 > 0.0 and a22 > 0.0 and b11 > 0.0 and b22 > 0.0):
        return 0, 0, 1
    d11 = 1.0
    d22 = 1.0
    if per_step_rescale:
        a11, a12r, a12i, a22, b12r, b12i, d11, d22 = _k_rescale2(
            a11, a12r, a12i, a22, b11, b12r, b12i, b22)
    if _k_gate(a11, a12r, a12i, a22, b12r, b12i, epsn):
        if sort and a11 < a22:
            _k_swap_cols(Fr, Fi, i, j, is_cplx)
            _k_swap_cols(Gr, Gi, i, j, is_cplx)
            _k_swap_cols(Zr, Zi, i, j, is_cplx)
        return 0, 0, 0
    if is_cplx:
        (z11, z12r, z12i, z21r, z21i, z22, cphi, cpsi, _t,
         _x, _czr, _czi, _u, _v, _h) = _k_transform_cplx(
            a11, a12r, a12i, a22, b12r, b12i)
    else:
        z11, z12r, z21r, z22, cphi, cpsi, _t, _xi, _eta, _c2 = \
            _k_transform_real(a11, a12r, a22, b12r)
        z12i = 0.0
        z21i = 0.0
    if crit_c2:
        big = 0 if (cphi == 1.0 and cpsi == 1.0) else 1
    else:
        big = 0 if (z11 == 1.0 and z22 == 1.0) else 1
    swap = False
    if sort and not is_cplx:
        a1pp, a2pp = _k_diag_after_real(z11, z12r, z21r, z22, a11, a12r, a22)
        swap = a1pp < a2pp
    # complete the transform with the pivot rescaler rows
    z11 = z11 * d11
    z12r = z12r * d11
    z12i = z12i * d11
    z21r = z21r * d22
    z21i = z21i * d22
    z22 = z22 * d22
    _k_update_cols(Fr, Fi, i, j, z11, z12r, z12i, z21r, z21i, z22, is_cplx)
    _k_update_cols(Gr, Gi, i, j, z11, z12r, z12i, z21r, z21i, z22, is_cplx)
    _k_update_cols(Zr, Zi, i, j, z11, z12r, z12i, z21r, z21i, z22, is_cplx)
    if sort and is_cplx:
        ni = _k_col_norm(Fr, Fi, i, is_cplx, comp, buf)
        nj = _k_col_norm(Fr, Fi, j, is_cplx, comp, buf)
        swap = ni < nj
    if swap:
        _k_swap_cols(Fr, Fi, i, j, is_cplx)
        _k_swap_cols(Gr, Gi, i, j, is_cplx)
        _k_swap_cols(Zr, Zi, i, j, is_cplx)
    return 1, big, 0


@njit(cache=True, nogil=True, error_model="numpy")
def _k_pointwise(Fr, Fi, Gr, Gi, Zr, Zi, is_cplx, table, per_step_rescale,
                 comp, crit_c2, sort, max_sweeps, epsn):
    """Sweep loop.  Returns (sweeps, total, big, converged, bad)."""
    steps = table.shape[0]
    half = table.shape[1]
    buf = np.empty(_k_pow2(max(Fr.shape[0], Gr.shape[0])))
    total = 0
    big = 0
    sweeps = 0
    converged = False
    for _ in range(max_sweeps):
        s_cnt = 0
        b_cnt = 0
        for st in range(steps):
            for l in range(half):
                s, b, bad = _k_process_pivot(
                    Fr, Fi, Gr, Gi, Zr, Zi, table[st, l, 0], table[st, l, 1],
                    is_cplx, per_step_rescale, comp, crit_c2, sort, epsn, buf)
                if bad != 0:
                    return sweeps, total, big, False, 1
                s_cnt += s
                b_cnt += b
        sweeps += 1
        if s_cnt == 0:
            converged = True
            break
        total += s_cnt
        big += b_cnt
    return sweeps, total, big, converged, 0


@njit(cache=True, nogil=True, error_model="numpy")
def _k_prescale(Fr, Fi, Gr, Gi, z0, is_cplx, comp):
    """Unit-normalize the G columns, scaling F alongside; fills z0."""
    n = Gr.shape[1]
    buf = np.empty(_k_pow2(Gr.shape[0]))
    for j in range(n):
        ng2 = _k_col_norm(Gr, Gi, j, is_cplx, comp, buf)
        if not ng2 > 0.0:
            return 1
        z = 1.0 / math.sqrt(ng2)
        z0[j] = z
        if z != 1.0:
            for r in range(Fr.shape[0]):
                Fr[r, j] *= z
                if is_cplx:
                    Fi[r, j] *= z
            for r in range(Gr.shape[0]):
                Gr[r, j] *= z
                if is_cplx:
                    Gi[r, j] *= z
    return 0


@njit(cache=True, nogil=True, error_model="numpy")
def _k_theta_rescale(Fr, Fi, Gr, Gi, Zr, Zi, is_cplx, comp):
    """Scale each Z column by 1/sqrt(|f|^2 + |g|^2)."""
    n = Fr.shape[1]
    buf = np.empty(_k_pow2(max(Fr.shape[0], Gr.shape[0])))
    for j in range(n):
        s = _k_col_norm(Fr, Fi, j, is_cplx, comp, buf) + \
            _k_col_norm(Gr, Gi, j, is_cplx, comp, buf)
        if not s > 0.0:
            return 1
        th = 1.0 / math.sqrt(s)
        if th != 1.0:
            for r in range(Zr.shape[0]):
                Zr[r, j] *= th
                if is_cplx:
                    Zi[r, j] *= th
    return 0


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

def _planes(m):
    re = np.asfortranarray(m.re.copy())
    if m.is_complex:
        return re, np.asfortranarray(m.im.copy())
    return re, np.zeros_like(re, order="F")


def _wrap(re, im, is_cplx):
    if is_cplx:
        return MatrixPlanePair(re.shape[0], re.shape[1], re, im, True)
    return MatrixPlanePair(re.shape[0], re.shape[1], re, None, False)


def prescale_init(F, G, prescale=True, compensated=False):
    """Return (F0, G0, z0) where z0 is the diagonal of the initial Z."""
    Fr, Fi = _planes(F)
    Gr, Gi = _planes(G)
    z0 = np.ones(F.cols)
    if prescale:
        if _k_prescale(Fr, Fi, Gr, Gi, z0, F.is_complex, compensated) != 0:
            raise RankError("zero G column during prescaling")
    return (_wrap(Fr, Fi, F.is_complex), _wrap(Gr, Gi, G.is_complex), z0)


def gsvd_1x1(F, G):
    """Closed form for a single-column pair."""
    from .dotprod import norm_sq
    f = F.to_dense()[:, 0]
    g = G.to_dense()[:, 0]
    nf2 = norm_sq(f, F.field)
    ng2 = norm_sq(g, G.field)
    if not (nf2 > 0.0 and ng2 > 0.0):
        raise RankError("zero column in a 1x1 problem")
    nf = math.sqrt(nf2)
    ng = math.sqrt(ng2)
    rt = math.sqrt(nf2 + ng2)
    z = 1.0 / rt
    sf = nf / rt
    sg = ng / rt
    U = MatrixPlanePair.from_dense((f * (1.0 / nf)).reshape(-1, 1))
    V = MatrixPlanePair.from_dense((g * (1.0 / ng)).reshape(-1, 1))
    Z = MatrixPlanePair.from_dense(np.array([[z]])) if not F.is_complex else \
        MatrixPlanePair.from_dense(np.array([[complex(z, 0.0)]]))
    return GsvdResult(U, V, Z, np.array([sf]), np.array([sg]),
                      np.array([nf / ng]), sweeps=0, total_transforms=0,
                      big_transforms=0, converged=True)


def solve_pointwise(F, G, cfg=None, inner=False, epsn=None):
    """Run the pointwise solver on a pair with an even column count.

    Returns (F', G', Ztilde, SweepStats, converged); with ``inner`` the
    accumulated Z carries the final theta rescaling.
    """
    cfg = cfg or SolverConfig()
    n = F.cols
    if n < 2 or n % 2 != 0:
        raise ValueError("pointwise solver needs an even column count >= 2")
    is_cplx = F.is_complex
    Fr, Fi = _planes(F)
    Gr, Gi = _planes(G)
    Zr = np.zeros((n, n), order="F")
    Zi = np.zeros((n, n), order="F")
    z0 = np.ones(n)
    if cfg.prescale:
        if _k_prescale(Fr, Fi, Gr, Gi, z0, is_cplx, cfg.compensated) != 0:
            raise RankError("zero G column during prescaling")
    np.fill_diagonal(Zr, z0)
    table = gen_table(cfg.inner_kind, n).as_array()
    if epsn is None:
        epsn = cfg.gate_eps * math.sqrt(n)
    sweeps, total, big, converged, bad = _k_pointwise(
        Fr, Fi, Gr, Gi, Zr, Zi, is_cplx, table, not cfg.prescale,
        cfg.compensated, cfg.criterion == "C2", cfg.sorting,
        cfg.max_inner_sweeps, epsn)
    if bad:
        raise RankError("zero column encountered during sweeps")
    if inner:
        if _k_theta_rescale(Fr, Fi, Gr, Gi, Zr, Zi, is_cplx, cfg.compensated) != 0:
            raise RankError("zero column pencil during rescaling")
    return (_wrap(Fr, Fi, is_cplx), _wrap(Gr, Gi, is_cplx),
            _wrap(Zr, Zi if is_cplx else None, is_cplx),
            SweepStats(total, big), converged)
