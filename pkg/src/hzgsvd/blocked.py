"""The blocked outer level and the top-level drivers.

An outer step pairs two block columns of width w, forms the 2w x 2w Grammians
of the F and G blocks, factors them by Cholesky (falling back to, or on
request replaced by, a Householder QR shortening of the block columns), runs
the pointwise solver on the factor pair, and postmultiplies the F, G, and Z
block columns by the accumulated, theta-rescaled inner transform.

The outer sweep stops once a sweep applies no *big* transformations: the
rounding noise of forming and factoring the pivot blocks keeps producing a
few near-identity transforms that must not stall convergence.  Between outer
sweeps the Z columns get the same theta rescaling; since every applied inner
transform already leaves |f_j|^2 + |g_j|^2 = 1 per column up to rounding, the
inter-sweep pass only mops up drift.

Block tasks inside one outer step own disjoint columns and may run on a
thread pool of any size with bitwise identical results.
"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numba import njit

from ._fp import fma
from .core import GsvdResult, MatrixPlanePair, ProblemPair, border_pair
from .dotprod import _k_pow2
from .errors import NotPositiveDefiniteError, RankError
from .kernel2x2 import EPS
from .pointwise import (SolverConfig, _k_col_dot, _k_col_norm, _k_pointwise,
                        _k_prescale, _k_theta_rescale, gsvd_1x1)
from .strategies import gen_table


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True, error_model="numpy")
def _k_grammian(Yr, Yi, c0, c1, w, is_cplx, comp, Ar, Ai):
    """2w x 2w Grammian of the block-column pair starting at c0 and c1; the
    upper triangle is computed, the lower mirrored by conjugation."""
    tw = 2 * w
    buf = np.empty(_k_pow2(Yr.shape[0]))
    for r in range(tw):
        cr = c0 + r if r < w else c1 + (r - w)
        Ar[r, r] = _k_col_norm(Yr, Yi, cr, is_cplx, comp, buf)
        Ai[r, r] = 0.0
        for s in range(r + 1, tw):
            cs = c0 + s if s < w else c1 + (s - w)
            re, im = _k_col_dot(Yr, Yi, cr, cs, is_cplx, comp, buf)
            Ar[r, s] = re
            Ai[r, s] = im
            Ar[s, r] = re
            Ai[s, r] = -im


@njit(cache=True, nogil=True, error_model="numpy")
def _k_cholesky_upper(Ar, Ai, is_cplx):
    """In-place upper Cholesky factor with positive real diagonal; the
    strictly lower triangle is zeroed.  Returns 1 on a non-positive or
    non-finite pivot."""
    m = Ar.shape[0]
    for j in range(m):
        d = Ar[j, j]
        if not (d > 0.0) or not np.isfinite(d):
            return 1
        rt = math.sqrt(d)
        rinv = 1.0 / rt
        Ar[j, j] = rt
        Ai[j, j] = 0.0
        for x in range(j + 1, m):
            Ar[x, j] *= rinv
            if is_cplx:
                Ai[x, j] *= rinv
        for jp in range(j + 1, m):
            br = Ar[jp, j]
            bi = -Ai[jp, j] if is_cplx else 0.0
            for x in range(jp, m):
                ar = -Ar[x, j]
                if is_cplx:
                    ai = -Ai[x, j]
                    Ar[x, jp] = fma(ar, br, fma(-ai, bi, Ar[x, jp]))
                    Ai[x, jp] = fma(ar, bi, fma(ai, br, Ai[x, jp]))
                else:
                    Ar[x, jp] = fma(ar, br, Ar[x, jp])
    for r in range(m):
        for s in range(r):
            Ar[s, r] = Ar[r, s]
            Ai[s, r] = -Ai[r, s]
            Ar[r, s] = 0.0
            Ai[r, s] = 0.0
    return 0


@njit(cache=True, nogil=True, error_model="numpy")
def _k_qr_rfactor(Ar, Ai, nc, is_cplx, pivot, jpvt, tol_scale):
    """Householder QR of the m x nc stack in place; the R factor with a
    nonnegative real diagonal lands in the top nc rows.

    With ``pivot`` the column of the largest remaining norm is chosen at each
    step (ties to the lowest index) and recorded in jpvt.  Returns 1 when a
    diagonal falls below tol_scale times the norm its column had on entry.
    """
    m = Ar.shape[0]
    innorm = np.empty(nc)
    for c in range(nc):
        s = 0.0
        for x in range(m):
            s = fma(Ar[x, c], Ar[x, c], s)
            if is_cplx:
                s = fma(Ai[x, c], Ai[x, c], s)
        innorm[c] = math.sqrt(s)
    for k in range(nc):
        if pivot:
            best = k
            bestn = -1.0
            for c in range(k, nc):
                s = 0.0
                for x in range(k, m):
                    s = fma(Ar[x, c], Ar[x, c], s)
                    if is_cplx:
                        s = fma(Ai[x, c], Ai[x, c], s)
                if s > bestn:
                    bestn = s
                    best = c
            if best != k:
                for x in range(m):
                    t = Ar[x, k]
                    Ar[x, k] = Ar[x, best]
                    Ar[x, best] = t
                    t = Ai[x, k]
                    Ai[x, k] = Ai[x, best]
                    Ai[x, best] = t
                t2 = jpvt[k]
                jpvt[k] = jpvt[best]
                jpvt[best] = t2
                t = innorm[k]
                innorm[k] = innorm[best]
                innorm[best] = t
        s = 0.0
        for x in range(k, m):
            s = fma(Ar[x, k], Ar[x, k], s)
            if is_cplx:
                s = fma(Ai[x, k], Ai[x, k], s)
        normx = math.sqrt(s)
        if normx == 0.0:
            return 1
        akr = Ar[k, k]
        aki = Ai[k, k] if is_cplx else 0.0
        aa = math.hypot(akr, aki)
        if aa == 0.0:
            phr = 1.0
            phi = 0.0
        else:
            phr = akr / aa
            phi = aki / aa
        alr = -(phr * normx)
        ali = -(phi * normx)
        Ar[k, k] -= alr
        if is_cplx:
            Ai[k, k] -= ali
        vn = 0.0
        for x in range(k, m):
            vn = fma(Ar[x, k], Ar[x, k], vn)
            if is_cplx:
                vn = fma(Ai[x, k], Ai[x, k], vn)
        beta = 2.0 / vn
        for c in range(k + 1, nc):
            wr = 0.0
            wi = 0.0
            for x in range(k, m):
                # w += conj(v_x) * a_x
                wr = fma(Ar[x, k], Ar[x, c], wr)
                if is_cplx:
                    wr = fma(Ai[x, k], Ai[x, c], wr)
                    wi = fma(Ar[x, k], Ai[x, c], fma(-Ai[x, k], Ar[x, c], wi))
            wr *= beta
            wi *= beta
            for x in range(k, m):
                # a_x -= v_x * w
                Ar[x, c] = fma(-Ar[x, k], wr, Ar[x, c])
                if is_cplx:
                    Ar[x, c] = fma(Ai[x, k], wi, Ar[x, c])
                    Ai[x, c] = fma(-Ar[x, k], wi, fma(-Ai[x, k], wr, Ai[x, c]))
        Ar[k, k] = alr
        if is_cplx:
            Ai[k, k] = ali
        for x in range(k + 1, m):
            Ar[x, k] = 0.0
            if is_cplx:
                Ai[x, k] = 0.0
    bad = 0
    for k in range(nc):
        if not (math.hypot(Ar[k, k], Ai[k, k]) >= tol_scale * innorm[k]):
            bad = 1
    # fix the diagonal phases so the diagonal is real and nonnegative
    for k in range(nc):
        dkr = Ar[k, k]
        dki = Ai[k, k] if is_cplx else 0.0
        if is_cplx:
            mag = math.hypot(dkr, dki)
            if mag == 0.0:
                continue
            phr = dkr / mag
            phi = -(dki / mag)
            for c in range(k, nc):
                re = fma(Ar[k, c], phr, -(Ai[k, c] * phi))
                im = fma(Ar[k, c], phi, Ai[k, c] * phr)
                Ar[k, c] = re
                Ai[k, c] = im
            Ai[k, k] = 0.0
        elif dkr < 0.0:
            for c in range(k, nc):
                Ar[k, c] = -Ar[k, c]
    return bad


@njit(cache=True, nogil=True, error_model="numpy")
def _k_postmult(Yr, Yi, c0, c1, w, Br, Bi, is_cplx):
    """Postmultiply the block-column pair by the 2w x 2w transform, one read
    and one write per element, fused accumulation over the inner index."""
    tw = 2 * w
    m = Yr.shape[0]
    rowr = np.empty(tw)
    rowi = np.empty(tw)
    outr = np.empty(tw)
    outi = np.empty(tw)
    for r in range(m):
        for s in range(tw):
            c = c0 + s if s < w else c1 + (s - w)
            rowr[s] = Yr[r, c]
            rowi[s] = Yi[r, c] if is_cplx else 0.0
        for c in range(tw):
            ar = 0.0
            ai = 0.0
            for k in range(tw):
                if is_cplx:
                    ar = fma(rowr[k], Br[k, c], fma(-rowi[k], Bi[k, c], ar))
                    ai = fma(rowr[k], Bi[k, c], fma(rowi[k], Br[k, c], ai))
                else:
                    ar = fma(rowr[k], Br[k, c], ar)
            outr[c] = ar
            outi[c] = ai
        for s in range(tw):
            c = c0 + s if s < w else c1 + (s - w)
            Yr[r, c] = outr[s]
            if is_cplx:
                Yi[r, c] = outi[s]


@njit(cache=True, nogil=True, error_model="numpy")
def _k_rescale_full(Fr, Fi, Gr, Gi, Zr, Zi, is_cplx, comp, final,
                    sigF, sigG, sig):
    """Z rescaling; with ``final`` also normalizes F and G columns and
    extracts the three sigma vectors."""
    n = Fr.shape[1]
    buf = np.empty(_k_pow2(max(Fr.shape[0], Gr.shape[0])))
    for j in range(n):
        nf2 = _k_col_norm(Fr, Fi, j, is_cplx, comp, buf)
        ng2 = _k_col_norm(Gr, Gi, j, is_cplx, comp, buf)
        sf = 0.0
        sg = 0.0
        if final:
            if not (nf2 > 0.0 and ng2 > 0.0):
                return 1
            sf = math.sqrt(nf2)
            if nf2 != 1.0:
                r = 1.0 / sf
                for x in range(Fr.shape[0]):
                    Fr[x, j] *= r
                    if is_cplx:
                        Fi[x, j] *= r
            sg = math.sqrt(ng2)
            if ng2 != 1.0:
                r = 1.0 / sg
                for x in range(Gr.shape[0]):
                    Gr[x, j] *= r
                    if is_cplx:
                        Gi[x, j] *= r
        s = nf2 + ng2
        if not s > 0.0:
            return 1
        th = 1.0 / math.sqrt(s)
        if th != 1.0:
            for x in range(Zr.shape[0]):
                Zr[x, j] *= th
                if is_cplx:
                    Zi[x, j] *= th
        if final:
            sigF[j] = sf * th
            sigG[j] = sg * th
            sig[j] = sigF[j] / sigG[j]
    return 0


@njit(cache=True, nogil=True, error_model="numpy")
def _k_is_identity(Br, Bi, is_cplx):
    m = Br.shape[0]
    for r in range(m):
        for c in range(m):
            want = 1.0 if r == c else 0.0
            if Br[r, c] != want:
                return False
            if is_cplx and Bi[r, c] != 0.0:
                return False
    return True


# ---------------------------------------------------------------------------
# public single operations
# ---------------------------------------------------------------------------

def _dense_planes(a):
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return (np.asfortranarray(a.real.astype(np.float64)),
                np.asfortranarray(a.imag.astype(np.float64)), True)
    re = np.asfortranarray(a.astype(np.float64))
    return re, np.zeros_like(re, order="F"), False


def _join(re, im, is_cplx):
    return re + 1j * im if is_cplx else re.copy()


def form_grammians(Fp, Fq, Gp, Gq, compensated=False):
    """Grammians of the stacked block-column pairs [Fp Fq] and [Gp Gq]."""
    A = _gram_of_pair(Fp, Fq, compensated)
    B = _gram_of_pair(Gp, Gq, compensated)
    return A, B


def _as_cols(Y):
    Y = np.asarray(Y)
    return Y.reshape(Y.shape[0], -1)


def _gram_of_pair(Yp, Yq, compensated):
    Yr, Yi, is_cplx = _dense_planes(np.hstack([_as_cols(Yp), _as_cols(Yq)]))
    w = Yr.shape[1] // 2
    tw = 2 * w
    Ar = np.zeros((tw, tw), order="F")
    Ai = np.zeros((tw, tw), order="F")
    _k_grammian(Yr, Yi, 0, w, w, is_cplx, compensated, Ar, Ai)
    return _join(Ar, Ai, is_cplx)


def cholesky_upper(M):
    """Upper Cholesky factor with positive real diagonal."""
    Ar, Ai, is_cplx = _dense_planes(np.array(M))
    if _k_cholesky_upper(Ar, Ai, is_cplx) != 0:
        raise NotPositiveDefiniteError("matrix is not numerically positive definite")
    return _join(Ar, Ai, is_cplx)


def qr_shorten(Yp, Yq):
    """R factor (nonnegative diagonal) of the stacked block-column pair; the
    orthogonal factor is discarded."""
    stack = np.hstack([_as_cols(Yp), _as_cols(Yq)])
    Ar, Ai, is_cplx = _dense_planes(stack)
    nc = Ar.shape[1]
    jpvt = np.arange(nc, dtype=np.int64)
    if _k_qr_rfactor(Ar, Ai, nc, is_cplx, False, jpvt, nc * EPS) != 0:
        raise RankError("rank-deficient block columns in the QR shortening")
    return _join(Ar[:nc, :], Ai[:nc, :], is_cplx)


def postmultiply(Yp, Yq, Ztilde):
    """[Yp' Yq'] = [Yp Yq] Ztilde."""
    Yp = _as_cols(Yp)
    w = Yp.shape[1]
    stack = np.hstack([Yp, _as_cols(Yq)])
    Br, Bi, bc = _dense_planes(np.asarray(Ztilde))
    if bc:
        stack = stack.astype(np.complex128)
    Yr, Yi, is_cplx = _dense_planes(stack)
    _k_postmult(Yr, Yi, 0, w, w, Br, Bi, is_cplx)
    out = _join(Yr, Yi, is_cplx)
    return out[:, :w], out[:, w:]


def rescale_z(F, G, Z, final=False, compensated=False):
    """Theta rescaling of Z; with ``final`` also returns (U, V, sigmas)."""
    from .pointwise import _planes, _wrap
    Fr, Fi = _planes(F)
    Gr, Gi = _planes(G)
    Zr, Zi = _planes(Z)
    n = F.cols
    sigF = np.zeros(n)
    sigG = np.zeros(n)
    sig = np.zeros(n)
    st = _k_rescale_full(Fr, Fi, Gr, Gi, Zr, Zi, F.is_complex, compensated,
                         final, sigF, sigG, sig)
    if st != 0:
        raise RankError("zero column during rescaling")
    Zo = _wrap(Zr, Zi, Z.is_complex)
    if not final:
        return Zo
    return (_wrap(Fr, Fi, F.is_complex), _wrap(Gr, Gi, G.is_complex), Zo,
            sigF, sigG, sig)


def preprocess_tall(F, G):
    """Shorten a tall pair to square via two column-pivoted QR factorizations.

    Returns (F'', G'', piv) where the k-th column of the shortened problem
    corresponds to the original column piv[k]; a Z'' computed for the
    shortened pair maps back by Z[piv[k], :] = Z''[k, :].
    """
    n = F.cols
    Fr, Fi = np.asfortranarray(F.re.copy()), \
        (np.asfortranarray(F.im.copy()) if F.is_complex else np.zeros_like(F.re, order="F"))
    jp1 = np.arange(n, dtype=np.int64)
    if _k_qr_rfactor(Fr, Fi, n, F.is_complex, True, jp1, n * EPS) != 0:
        raise RankError("numerically rank-deficient F in the preprocessing")
    RF = _join(Fr[:n, :], Fi[:n, :], F.is_complex)
    Gp = G.to_dense()[:, jp1]
    Gr, Gi, _ = _dense_planes(Gp)
    jp2 = np.arange(n, dtype=np.int64)
    if _k_qr_rfactor(Gr, Gi, n, G.is_complex, True, jp2, n * EPS) != 0:
        raise RankError("numerically rank-deficient G in the preprocessing")
    RG = _join(Gr[:n, :], Gi[:n, :], G.is_complex)
    Fpp = MatrixPlanePair.from_dense(RF[:, jp2])
    Gpp = MatrixPlanePair.from_dense(RG)
    piv = jp1[jp2]
    return Fpp, Gpp, piv


# ---------------------------------------------------------------------------
# the blocked driver (outer level)
# ---------------------------------------------------------------------------

def _block_task(args):
    (Fr, Fi, Gr, Gi, Zr, Zi, is_cplx, pblk, qblk, w, cfg, inner_table,
     epsn) = args
    c0 = pblk * w
    c1 = qblk * w
    tw = 2 * w
    Fhr = np.zeros((tw, tw), order="F")
    Fhi = np.zeros((tw, tw), order="F")
    Ghr = np.zeros((tw, tw), order="F")
    Ghi = np.zeros((tw, tw), order="F")
    if cfg.shorten == "qr":
        _shorten_qr(Fr, Fi, c0, c1, w, is_cplx, Fhr, Fhi)
        _shorten_qr(Gr, Gi, c0, c1, w, is_cplx, Ghr, Ghi)
    else:
        _k_grammian(Fr, Fi, c0, c1, w, is_cplx, cfg.compensated, Fhr, Fhi)
        if _k_cholesky_upper(Fhr, Fhi, is_cplx) != 0:
            if not cfg.fallback_qr:
                raise NotPositiveDefiniteError(
                    "indefinite F block (%d, %d); enable the QR fallback"
                    % (pblk, qblk))
            _shorten_qr(Fr, Fi, c0, c1, w, is_cplx, Fhr, Fhi)
        _k_grammian(Gr, Gi, c0, c1, w, is_cplx, cfg.compensated, Ghr, Ghi)
        if _k_cholesky_upper(Ghr, Ghi, is_cplx) != 0:
            if not cfg.fallback_qr:
                raise NotPositiveDefiniteError(
                    "indefinite G block (%d, %d); enable the QR fallback"
                    % (pblk, qblk))
            _shorten_qr(Gr, Gi, c0, c1, w, is_cplx, Ghr, Ghi)
    Zhr = np.zeros((tw, tw), order="F")
    Zhi = np.zeros((tw, tw), order="F")
    z0 = np.ones(tw)
    if cfg.prescale:
        if _k_prescale(Fhr, Fhi, Ghr, Ghi, z0, is_cplx, cfg.compensated) != 0:
            raise RankError("zero factor column in block (%d, %d)" % (pblk, qblk))
    np.fill_diagonal(Zhr, z0)
    _sw, total, big, _conv, bad = _k_pointwise(
        Fhr, Fhi, Ghr, Ghi, Zhr, Zhi, is_cplx, inner_table,
        not cfg.prescale, cfg.compensated, cfg.criterion == "C2",
        cfg.sorting, cfg.max_inner_sweeps, epsn)
    if bad:
        raise RankError("zero column in the inner solve of block (%d, %d)"
                        % (pblk, qblk))
    if _k_theta_rescale(Fhr, Fhi, Ghr, Ghi, Zhr, Zhi, is_cplx,
                        cfg.compensated) != 0:
        raise RankError("zero pencil column in block (%d, %d)" % (pblk, qblk))
    if not _k_is_identity(Zhr, Zhi, is_cplx):
        _k_postmult(Fr, Fi, c0, c1, w, Zhr, Zhi, is_cplx)
        _k_postmult(Gr, Gi, c0, c1, w, Zhr, Zhi, is_cplx)
        _k_postmult(Zr, Zi, c0, c1, w, Zhr, Zhi, is_cplx)
    return total, big


def _shorten_qr(Yr, Yi, c0, c1, w, is_cplx, outR, outI):
    m = Yr.shape[0]
    tw = 2 * w
    Sr = np.empty((m, tw), order="F")
    Si = np.empty((m, tw), order="F")
    Sr[:, :w] = Yr[:, c0:c0 + w]
    Sr[:, w:] = Yr[:, c1:c1 + w]
    Si[:, :w] = Yi[:, c0:c0 + w]
    Si[:, w:] = Yi[:, c1:c1 + w]
    jpvt = np.arange(tw, dtype=np.int64)
    if _k_qr_rfactor(Sr, Si, tw, is_cplx, False, jpvt, tw * EPS) != 0:
        raise RankError("rank-deficient block columns in the QR shortening")
    outR[:, :] = Sr[:tw, :]
    outI[:, :] = Si[:tw, :]


def _algorithm1_loop(Fr, Fi, Gr, Gi, Zr, Zi, is_cplx, cfg, sweep_cap, epsn,
                     trailing_rescale):
    """The outer sweep loop on prepared planes.  Returns (sweeps, total, big,
    converged).  With ``trailing_rescale`` a non-final Z rescaling always runs
    after the loop, which is how the driver is embedded in a distributed
    worker; the single-process driver runs the final rescaling itself."""
    n = Fr.shape[1]
    w = cfg.block_width
    nblk = n // w
    outer = gen_table(cfg.outer_kind, nblk)
    inner_table = gen_table(cfg.inner_kind, 2 * w).as_array()
    total = 0
    big = 0
    sweeps = 0
    converged = False
    dropped = np.zeros(0)
    executor = ThreadPoolExecutor(max_workers=cfg.pool) if cfg.pool > 1 else None
    try:
        for _c in range(sweep_cap):
            s_sw = 0
            b_sw = 0
            for step in outer.steps:
                tasks = [(Fr, Fi, Gr, Gi, Zr, Zi, is_cplx, pb, qb, w, cfg,
                          inner_table, epsn) for (pb, qb) in step]
                if executor is not None:
                    results = list(executor.map(_block_task, tasks))
                else:
                    results = [_block_task(t) for t in tasks]
                for (t, b) in results:
                    s_sw += t
                    b_sw += b
            sweeps += 1
            total += s_sw
            big += b_sw
            if b_sw == 0:
                converged = True
                break
            if _k_rescale_full(Fr, Fi, Gr, Gi, Zr, Zi, is_cplx, cfg.compensated,
                               False, dropped, dropped, dropped) != 0:
                raise RankError("zero pencil column between sweeps")
    finally:
        if executor is not None:
            executor.shutdown()
    if trailing_rescale:
        if _k_rescale_full(Fr, Fi, Gr, Gi, Zr, Zi, is_cplx, cfg.compensated,
                           False, dropped, dropped, dropped) != 0:
            raise RankError("zero pencil column after the sweep loop")
    return sweeps, total, big, converged


def gsvd_blocked(p, cfg=None, epsn=None):
    """Full blocked solve of a bordered pair (column count a multiple of 2w)."""
    cfg = cfg or SolverConfig()
    n = p.n
    w = cfg.block_width
    if n % (2 * w) != 0:
        raise ValueError("blocked solver needs n divisible by 2w; border first")
    is_cplx = p.is_complex
    from .pointwise import _planes
    Fr, Fi = _planes(p.F)
    Gr, Gi = _planes(p.G)
    Zr = np.zeros((n, n), order="F")
    Zi = np.zeros((n, n), order="F")
    z0 = np.ones(n)
    if cfg.prescale:
        if _k_prescale(Fr, Fi, Gr, Gi, z0, is_cplx, cfg.compensated) != 0:
            raise RankError("zero G column during prescaling")
    np.fill_diagonal(Zr, z0)
    if epsn is None:
        epsn = cfg.gate_eps * math.sqrt(n)
    sweeps, total, big, converged = _algorithm1_loop(
        Fr, Fi, Gr, Gi, Zr, Zi, is_cplx, cfg, cfg.max_outer_sweeps, epsn,
        trailing_rescale=False)
    sigF = np.zeros(n)
    sigG = np.zeros(n)
    sig = np.zeros(n)
    if _k_rescale_full(Fr, Fi, Gr, Gi, Zr, Zi, is_cplx, cfg.compensated,
                       True, sigF, sigG, sig) != 0:
        raise RankError("zero column at extraction")
    from .pointwise import _wrap
    return GsvdResult(_wrap(Fr, Fi, is_cplx), _wrap(Gr, Gi, is_cplx),
                      _wrap(Zr, Zi, is_cplx), sigF, sigG, sig,
                      sweeps=sweeps, total_transforms=total,
                      big_transforms=big, converged=converged)


# ---------------------------------------------------------------------------
# top-level driver
# ---------------------------------------------------------------------------

def _unborder(r, pb):
    """Strip the bordered solve back to the original problem: the output
    columns whose Z support lies entirely in the padded block belong to the
    padding and are dropped."""
    n = pb.n
    n0 = pb.original_n
    mF0 = pb.original_mF
    mG0 = pb.original_mG
    if n == n0 and r.U.rows == mF0 and r.V.rows == mG0:
        return r
    pad = np.abs(r.Z.re[n0:, :])
    if r.Z.is_complex:
        pad = pad + np.abs(r.Z.im[n0:, :])
    keep = np.where(pad.sum(axis=0) == 0.0)[0] if n > n0 else np.arange(n)
    if keep.size != n0:
        raise RankError("bordered solve mixed padded and original columns")

    def cut(m, rows, cols):
        re = np.asfortranarray(m.re[:rows, cols])
        im = np.asfortranarray(m.im[:rows, cols]) if m.is_complex else None
        return MatrixPlanePair(rows, len(cols), re, im, m.is_complex)

    return GsvdResult(cut(r.U, mF0, keep), cut(r.V, mG0, keep),
                      cut(r.Z, n0, keep), r.sigmaF[keep], r.sigmaG[keep],
                      r.sigma[keep], sweeps=r.sweeps,
                      total_transforms=r.total_transforms,
                      big_transforms=r.big_transforms, converged=r.converged,
                      workers=r.workers)


def _sort_descending(r):
    order = np.argsort(-r.sigma, kind="stable")
    if np.array_equal(order, np.arange(order.size)):
        return r

    def perm(m):
        re = np.asfortranarray(m.re[:, order])
        im = np.asfortranarray(m.im[:, order]) if m.is_complex else None
        return MatrixPlanePair(m.rows, m.cols, re, im, m.is_complex)

    return GsvdResult(perm(r.U), perm(r.V), perm(r.Z), r.sigmaF[order],
                      r.sigmaG[order], r.sigma[order], sweeps=r.sweeps,
                      total_transforms=r.total_transforms,
                      big_transforms=r.big_transforms, converged=r.converged,
                      workers=r.workers)


def solve(F, G, cfg=None, workers=1, worker_sweeps=1):
    """Border, solve, unborder, and sort a GSVD problem.

    F and G may be MatrixPlanePair values or plain numpy arrays.  With
    ``workers`` > 1 the distributed simulation runs with that many workers,
    each capped at ``worker_sweeps`` outer sweeps per outermost step.
    """
    cfg = cfg or SolverConfig()
    if isinstance(F, np.ndarray):
        F = MatrixPlanePair.from_dense(F)
    if isinstance(G, np.ndarray):
        G = MatrixPlanePair.from_dense(G)
    if F.cols == 1:
        return gsvd_1x1(F, G)
    p = ProblemPair(F, G)
    w = cfg.block_width
    colm = 2 * w * workers if workers > 1 else 2 * w
    pb = border_pair(p, colm, 2 * w)
    if workers > 1:
        from .distsim import run_distributed
        r = run_distributed(pb, cfg, workers, worker_sweeps)
    else:
        r = gsvd_blocked(pb, cfg)
    return _sort_descending(_unborder(r, pb))
