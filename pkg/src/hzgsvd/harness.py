"""Test-pair generation, accuracy metrics, and the eigenvalue-route comparison.

Pairs with prescribed generalized singular values are built as
F = U diag(sF) X and G = V diag(sG) X from random orthogonal U, V and a random
symmetric X, with the heavy products accumulated in compensated arithmetic.
The pseudorandom stream is a splitmix64 counter generator (the standard
constants 0x9E3779B97F4A7C15 / 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB);
reproducibility in the seed is the only contract.

The condition-sweep generator fixes the spectrum of A = F^T F at condition 10
and sweeps the condition of B = G^T G through powers of ten; the factors are
taken as diag(sqrt(lambda)) Q^H so the Grammians carry exactly the prescribed
spectra.  Solving via the assembled Grammians squares the conditioning, which
is what the eigenvalue route demonstrates: its accuracy collapses once
cond(B) passes about 1/sqrt(eps) while the factored route stays flat.

The eigenvalue route itself is deliberately independent machinery: Cholesky
of B, two triangular solves, and a classical cyclic-by-row two-sided Jacobi
eigensolver capped at 30 sweeps.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from ._fp import fma
from .blocked import _k_cholesky_upper, solve
from .core import MatrixPlanePair, ProblemPair
from .dotprod import (_k_dot_cplx_comp, _k_dot_real_comp, _k_norm_sq_cplx_comp,
                      _k_norm_sq_real_comp)
from .errors import NotPositiveDefiniteError
from .kernel2x2 import EPS
from .pointwise import SolverConfig


# ---------------------------------------------------------------------------
# pseudorandom stream
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _sm64_fill(seed, out):
    """Fill ``out`` with uniforms on (0, 1) from a splitmix64 stream."""
    state = np.uint64(seed)
    gamma = np.uint64(0x9E3779B97F4A7C15)
    m1 = np.uint64(0xBF58476D1CE4E5B9)
    m2 = np.uint64(0x94D049BB133111EB)
    for i in range(out.shape[0]):
        state = state + gamma
        z = state
        z = (z ^ (z >> np.uint64(30))) * m1
        z = (z ^ (z >> np.uint64(27))) * m2
        z = z ^ (z >> np.uint64(31))
        out[i] = (np.float64(z >> np.uint64(11)) + 0.5) * (2.0 ** -53)
    return out


def uniform_stream(seed, count):
    out = np.empty(count)
    _sm64_fill(np.uint64(int(seed) % (1 << 64)), out)
    return out


def gaussian_stream(seed, count):
    """Box-Muller pairs over the splitmix64 uniforms."""
    u = uniform_stream(seed, 2 * count)
    r = np.sqrt(-2.0 * np.log(u[0::2]))
    a = 2.0 * math.pi * u[1::2]
    return r * np.cos(a)


def _derive(seed, salt):
    return (int(seed) * 0x100000001B3 + salt) % (1 << 64)


# ---------------------------------------------------------------------------
# random orthogonal factors
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True, error_model="numpy")
def _k_apply_reflectors(Qr, Qi, Wr, Wi, is_cplx):
    """Q := H_{n-2} ... H_0 Q with H_k = I - 2 w_k w_k^H / |w_k|^2 supported
    on rows k..n-1; reflector vectors sit in the columns of W."""
    n = Qr.shape[0]
    for k in range(n - 1):
        vn = 0.0
        for x in range(k, n):
            vn = fma(Wr[x, k], Wr[x, k], vn)
            if is_cplx:
                vn = fma(Wi[x, k], Wi[x, k], vn)
        if vn == 0.0:
            continue
        beta = 2.0 / vn
        for c in range(n):
            sr = 0.0
            si = 0.0
            for x in range(k, n):
                sr = fma(Wr[x, k], Qr[x, c], sr)
                if is_cplx:
                    sr = fma(Wi[x, k], Qi[x, c], sr)
                    si = fma(Wr[x, k], Qi[x, c], fma(-Wi[x, k], Qr[x, c], si))
            sr *= beta
            si *= beta
            for x in range(k, n):
                Qr[x, c] = fma(-Wr[x, k], sr, Qr[x, c])
                if is_cplx:
                    Qr[x, c] = fma(Wi[x, k], si, Qr[x, c])
                    Qi[x, c] = fma(-Wr[x, k], si, fma(-Wi[x, k], sr, Qi[x, c]))


def random_orthogonal(n, seed, field="real"):
    """Product of n-1 random reflectors and a random sign/phase diagonal."""
    if n < 1:
        raise ValueError("order must be at least 1")
    is_cplx = field == "complex"
    Qr = np.zeros((n, n), order="F")
    Qi = np.zeros((n, n), order="F")
    u = uniform_stream(_derive(seed, 1), n)
    if is_cplx:
        for j in range(n):
            a = 2.0 * math.pi * u[j]
            Qr[j, j] = math.cos(a)
            Qi[j, j] = math.sin(a)
    else:
        for j in range(n):
            Qr[j, j] = 1.0 if u[j] < 0.5 else -1.0
    if n > 1:
        g = gaussian_stream(_derive(seed, 2), n * n)
        Wr = np.asfortranarray(g.reshape((n, n), order="F"))
        if is_cplx:
            g2 = gaussian_stream(_derive(seed, 3), n * n)
            Wi = np.asfortranarray(g2.reshape((n, n), order="F"))
        else:
            Wi = np.zeros((n, n), order="F")
        for k in range(n - 1):
            Wr[:k, k] = 0.0
            Wi[:k, k] = 0.0
        _k_apply_reflectors(Qr, Qi, Wr, Wi, is_cplx)
    if is_cplx:
        return MatrixPlanePair(n, n, Qr, Qi, True)
    return MatrixPlanePair(n, n, Qr, None, False)


# ---------------------------------------------------------------------------
# compensated matrix products
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True, error_model="numpy")
def _k_matmul_comp(Ar, Ai, Br, Bi, is_cplx, Cr, Ci):
    """C = A B with each entry a compensated dot product."""
    m = Ar.shape[0]
    kk = Ar.shape[1]
    n = Br.shape[1]
    rowr = np.empty(kk)
    rowi = np.empty(kk)
    for i in range(m):
        for k in range(kk):
            rowr[k] = Ar[i, k]
            rowi[k] = Ai[i, k]
        for j in range(n):
            if is_cplx:
                re, im = _k_dot_cplx_comp(rowr, rowi, Br[:, j], Bi[:, j], False)
                Cr[i, j] = re
                Ci[i, j] = im
            else:
                Cr[i, j] = _k_dot_real_comp(rowr, Br[:, j])


@njit(cache=True, nogil=True, error_model="numpy")
def _k_gram_plain(Ar, Ai, is_cplx, Cr, Ci):
    """C = A^H A with plain fused dot products (one rounding per term)."""
    n = Ar.shape[1]
    for i in range(n):
        for j in range(n):
            sr = 0.0
            si = 0.0
            for x in range(Ar.shape[0]):
                sr = fma(Ar[x, i], Ar[x, j], sr)
                if is_cplx:
                    sr = fma(Ai[x, i], Ai[x, j], sr)
                    si = fma(Ar[x, i], Ai[x, j], fma(-Ai[x, i], Ar[x, j], si))
            Cr[i, j] = sr
            Ci[i, j] = si


def matmul_compensated(A, B):
    """Dense product with compensated accumulation; plain ndarrays in/out."""
    Ar, Ai, ac = _dense(A)
    Br, Bi, bc = _dense(B)
    is_cplx = ac or bc
    Cr = np.zeros((Ar.shape[0], Br.shape[1]), order="F")
    Ci = np.zeros((Ar.shape[0], Br.shape[1]), order="F")
    _k_matmul_comp(Ar, Ai, Br, Bi, is_cplx, Cr, Ci)
    return Cr + 1j * Ci if is_cplx else Cr


def _dense(a):
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return (np.asfortranarray(a.real.astype(np.float64)),
                np.asfortranarray(a.imag.astype(np.float64)), True)
    re = np.asfortranarray(a.astype(np.float64))
    return re, np.zeros_like(re, order="F"), False


def _frob_comp(a):
    """Frobenius norm via the compensated sum of squared magnitudes."""
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return math.sqrt(_k_norm_sq_cplx_comp(
            np.ascontiguousarray(a.real.ravel()),
            np.ascontiguousarray(a.imag.ravel())))
    return math.sqrt(_k_norm_sq_real_comp(np.ascontiguousarray(
        a.astype(np.float64).ravel())))


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

@dataclass
class GenSpec:
    """Prescription for a generated pair: all values must be positive (the
    generator floor is 1e-10)."""

    n: int
    sigmaF: np.ndarray
    sigmaG: np.ndarray
    lambdaX: np.ndarray
    seed: int
    field: str = "real"
    identity_factors: bool = False

    def __post_init__(self):
        self.sigmaF = np.asarray(self.sigmaF, dtype=np.float64)
        self.sigmaG = np.asarray(self.sigmaG, dtype=np.float64)
        self.lambdaX = np.asarray(self.lambdaX, dtype=np.float64)
        for v in (self.sigmaF, self.sigmaG, self.lambdaX):
            if v.shape != (self.n,) or not (v > 0).all():
                raise ValueError("prescribed diagonals must be positive, length n")


@dataclass
class AccuracyReport:
    resF: float
    resG: float
    orthU: float
    orthV: float
    max_rel_sigma: Optional[float] = None
    avg_rel_sigma: Optional[float] = None


def random_genspec(n, seed, field="real", lo=1e-2, hi=1.0):
    """Uniformly random prescriptions on [lo, hi] (floor 1e-10 enforced)."""
    vals = uniform_stream(_derive(seed, 11), 3 * n) * (hi - lo) + lo
    vals = np.maximum(vals, 1e-10)
    return GenSpec(n, vals[:n], vals[n:2 * n], vals[2 * n:], seed, field)


def gen_pair(spec):
    """Build (F, G) = (U diag(sF) X, V diag(sG) X); returns the pair and the
    reference generalized singular values sorted descending."""
    n = spec.n
    if spec.identity_factors:
        U = np.eye(n)
        V = np.eye(n)
        X = np.eye(n)
        if spec.field == "complex":
            U = U.astype(np.complex128)
            V = V.astype(np.complex128)
            X = X.astype(np.complex128)
    else:
        U = random_orthogonal(n, _derive(spec.seed, 101), spec.field).to_dense()
        V = random_orthogonal(n, _derive(spec.seed, 102), spec.field).to_dense()
        W = random_orthogonal(n, _derive(spec.seed, 103), spec.field).to_dense()
        X = matmul_compensated(W * spec.lambdaX[np.newaxis, :],
                               W.conj().T)
        # exact Hermitian symmetrization
        X = np.asarray(X)
        iu = np.triu_indices(n, 1)
        X[(iu[1], iu[0])] = np.conj(X[iu])
        if np.iscomplexobj(X):
            np.fill_diagonal(X, X.diagonal().real)
    F = matmul_compensated(U * spec.sigmaF[np.newaxis, :], X)
    G = matmul_compensated(V * spec.sigmaG[np.newaxis, :], X)
    ref = np.sort(spec.sigmaF / spec.sigmaG)[::-1].copy()
    return ProblemPair(MatrixPlanePair.from_dense(F),
                       MatrixPlanePair.from_dense(G)), ref


def gen_condition_pair(n, kappa_exponent, seed, field="real"):
    """Pair whose Grammians have cond(A) = 10 and cond(B) = 10**j exactly by
    construction: F = diag(sqrt(lam_A)) QA^H, G = diag(sqrt(lam_B)) QB^H."""
    if n < 2 or kappa_exponent < 0:
        raise ValueError("need n >= 2 and a nonnegative exponent")
    lamA = np.power(10.0, -np.arange(n) / (n - 1.0))
    lamB = np.power(10.0, -kappa_exponent * np.arange(n) / (n - 1.0))
    QA = random_orthogonal(n, _derive(seed, 201), field).to_dense()
    QB = random_orthogonal(n, _derive(seed, 202), field).to_dense()
    F = np.sqrt(lamA)[:, np.newaxis] * QA.conj().T
    G = np.sqrt(lamB)[:, np.newaxis] * QB.conj().T
    Fr, Fi, is_cplx = _dense(F)
    Gr, Gi, _ = _dense(G)
    Ar = np.zeros((n, n), order="F")
    Ai = np.zeros((n, n), order="F")
    Br = np.zeros((n, n), order="F")
    Bi = np.zeros((n, n), order="F")
    _k_gram_plain(Fr, Fi, is_cplx, Ar, Ai)
    _k_gram_plain(Gr, Gi, is_cplx, Br, Bi)
    A = Ar + 1j * Ai if is_cplx else Ar
    B = Br + 1j * Bi if is_cplx else Br
    pair = ProblemPair(MatrixPlanePair.from_dense(F),
                       MatrixPlanePair.from_dense(G))
    return pair, A, B


# ---------------------------------------------------------------------------
# accuracy metrics
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True, error_model="numpy")
def _k_lu_complete(Ar, Ai, is_cplx, rp, cp):
    """LU with complete pivoting, in place; returns 1 on a zero pivot."""
    n = Ar.shape[0]
    for k in range(n):
        best = 0.0
        br = k
        bc = k
        for i in range(k, n):
            for j in range(k, n):
                m = math.hypot(Ar[i, j], Ai[i, j]) if is_cplx else abs(Ar[i, j])
                if m > best:
                    best = m
                    br = i
                    bc = j
        if best == 0.0:
            return 1
        if br != k:
            for j in range(n):
                t = Ar[k, j]
                Ar[k, j] = Ar[br, j]
                Ar[br, j] = t
                t = Ai[k, j]
                Ai[k, j] = Ai[br, j]
                Ai[br, j] = t
            rp[k], rp[br] = rp[br], rp[k]
        if bc != k:
            for i in range(n):
                t = Ar[i, k]
                Ar[i, k] = Ar[i, bc]
                Ar[i, bc] = t
                t = Ai[i, k]
                Ai[i, k] = Ai[i, bc]
                Ai[i, bc] = t
            cp[k], cp[bc] = cp[bc], cp[k]
        pr = Ar[k, k]
        pi = Ai[k, k]
        if is_cplx:
            den = fma(pr, pr, pi * pi)
        for i in range(k + 1, n):
            if is_cplx:
                lr = fma(Ar[i, k], pr, Ai[i, k] * pi) / den
                li = fma(Ai[i, k], pr, -(Ar[i, k] * pi)) / den
            else:
                lr = Ar[i, k] / pr
                li = 0.0
            Ar[i, k] = lr
            Ai[i, k] = li
            for j in range(k + 1, n):
                if is_cplx:
                    Ar[i, j] = fma(-lr, Ar[k, j], fma(li, Ai[k, j], Ar[i, j]))
                    Ai[i, j] = fma(-lr, Ai[k, j], fma(-li, Ar[k, j], Ai[i, j]))
                else:
                    Ar[i, j] = fma(-lr, Ar[k, j], Ar[i, j])
    return 0


@njit(cache=True, nogil=True, error_model="numpy")
def _k_lu_solve_inverse(Ar, Ai, is_cplx, rp, cp, Xr, Xi):
    """Solve Z X = I from the complete-pivoting LU of Z."""
    n = Ar.shape[0]
    yr = np.empty(n)
    yi = np.empty(n)
    for col in range(n):
        for i in range(n):
            yr[i] = 1.0 if rp[i] == col else 0.0
            yi[i] = 0.0
        for i in range(1, n):
            for k in range(i):
                if is_cplx:
                    yr[i] = fma(-Ar[i, k], yr[k], fma(Ai[i, k], yi[k], yr[i]))
                    yi[i] = fma(-Ar[i, k], yi[k], fma(-Ai[i, k], yr[k], yi[i]))
                else:
                    yr[i] = fma(-Ar[i, k], yr[k], yr[i])
        for i in range(n - 1, -1, -1):
            for k in range(i + 1, n):
                if is_cplx:
                    yr[i] = fma(-Ar[i, k], yr[k], fma(Ai[i, k], yi[k], yr[i]))
                    yi[i] = fma(-Ar[i, k], yi[k], fma(-Ai[i, k], yr[k], yi[i]))
                else:
                    yr[i] = fma(-Ar[i, k], yr[k], yr[i])
            pr = Ar[i, i]
            pi = Ai[i, i]
            if is_cplx:
                den = fma(pr, pr, pi * pi)
                tr = fma(yr[i], pr, yi[i] * pi) / den
                ti = fma(yi[i], pr, -(yr[i] * pi)) / den
                yr[i] = tr
                yi[i] = ti
            else:
                yr[i] = yr[i] / pr
        for i in range(n):
            Xr[cp[i], col] = yr[i]
            Xi[cp[i], col] = yi[i]
    return 0


def invert_via_lu(Z):
    """X = Z^{-1} by LU with complete pivoting and per-column solves."""
    Ar, Ai, is_cplx = _dense(np.array(Z))
    n = Ar.shape[0]
    rp = np.arange(n, dtype=np.int64)
    cp = np.arange(n, dtype=np.int64)
    if _k_lu_complete(Ar, Ai, is_cplx, rp, cp) != 0:
        raise NotPositiveDefiniteError("singular Z")
    Xr = np.zeros((n, n), order="F")
    Xi = np.zeros((n, n), order="F")
    _k_lu_solve_inverse(Ar, Ai, is_cplx, rp, cp, Xr, Xi)
    return Xr + 1j * Xi if is_cplx else Xr


def max_rel_err(computed, reference):
    """max |c - r| / r over descending-sorted values."""
    c = np.sort(np.asarray(computed))[::-1]
    r = np.sort(np.asarray(reference))[::-1]
    return float(np.max(np.abs(c - r) / r))


def accuracy_report(p, r, reference=None):
    """Residuals, orthogonality defects, and (with a reference) sigma errors,
    accumulated in compensated arithmetic."""
    F = p.F.to_dense()
    G = p.G.to_dense()
    U = r.U.to_dense()
    V = r.V.to_dense()
    X = invert_via_lu(r.Z.to_dense())
    n = p.n
    MF = matmul_compensated(U * r.sigmaF[np.newaxis, :], X)
    MG = matmul_compensated(V * r.sigmaG[np.newaxis, :], X)
    resF = _frob_comp(F - MF) / _frob_comp(F)
    resG = _frob_comp(G - MG) / _frob_comp(G)
    UU = matmul_compensated(U.conj().T, U)
    VV = matmul_compensated(V.conj().T, V)
    orthU = _frob_comp(UU - np.eye(n))
    orthV = _frob_comp(VV - np.eye(n))
    max_rel = avg_rel = None
    if reference is not None:
        c = np.sort(np.asarray(r.sigma))[::-1]
        ref = np.sort(np.asarray(reference))[::-1]
        rel = np.abs(c - ref) / ref
        max_rel = float(rel.max())
        avg_rel = float(rel.mean())
    return AccuracyReport(resF, resG, orthU, orthV, max_rel, avg_rel)


# ---------------------------------------------------------------------------
# the eigenvalue route
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True, error_model="numpy")
def _k_tri_solve_lower_left(Rr, Ri, Br, Bi, is_cplx):
    """Solve R^H Y = B in place of B (R upper triangular, so R^H is lower)."""
    n = Rr.shape[0]
    for c in range(Br.shape[1]):
        for i in range(n):
            sr = Br[i, c]
            si = Bi[i, c]
            for k in range(i):
                # subtract conj(R[k, i]) * Y[k, c]
                lr = Rr[k, i]
                li = -Ri[k, i]
                if is_cplx:
                    sr = fma(-lr, Br[k, c], fma(li, Bi[k, c], sr))
                    si = fma(-lr, Bi[k, c], fma(-li, Br[k, c], si))
                else:
                    sr = fma(-lr, Br[k, c], sr)
            d = Rr[i, i]
            Br[i, c] = sr / d
            Bi[i, c] = si / d
    return 0


@njit(cache=True, nogil=True, error_model="numpy")
def _k_tri_solve_upper_right(Yr, Yi, Rr, Ri, is_cplx):
    """Solve C R = Y in place of Y (R upper triangular)."""
    n = Rr.shape[0]
    for j in range(n):
        for k in range(j):
            rr = Rr[k, j]
            ri = Ri[k, j]
            for i in range(Yr.shape[0]):
                if is_cplx:
                    Yr[i, j] = fma(-Yr[i, k], rr, fma(Yi[i, k], ri, Yr[i, j]))
                    Yi[i, j] = fma(-Yr[i, k], ri, fma(-Yi[i, k], rr, Yi[i, j]))
                else:
                    Yr[i, j] = fma(-Yr[i, k], rr, Yr[i, j])
        d = Rr[j, j]
        for i in range(Yr.shape[0]):
            Yr[i, j] /= d
            Yi[i, j] /= d
    return 0


@njit(cache=True, nogil=True, error_model="numpy")
def _k_jacobi_eig(Cr, Ci, is_cplx, max_sweeps):
    """Classical two-sided Jacobi for a Hermitian matrix, cyclic by row."""
    n = Cr.shape[0]
    for _ in range(max_sweeps):
        rotated = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = math.hypot(Cr[p, q], Ci[p, q]) if is_cplx else abs(Cr[p, q])
                app = Cr[p, p]
                aqq = Cr[q, q]
                if apq <= 0.5e-15 * (abs(app) + abs(aqq)):
                    continue
                rotated += 1
                # make the pivot entry real and positive first: multiply
                # column q by the conjugate pivot phase and row q by its
                # conjugate (sign flip in the real case)
                if is_cplx:
                    phr = Cr[p, q] / apq
                    phi = Ci[p, q] / apq
                    for i in range(n):
                        re = fma(Cr[i, q], phr, Ci[i, q] * phi)
                        im = fma(Ci[i, q], phr, -(Cr[i, q] * phi))
                        Cr[i, q] = re
                        Ci[i, q] = im
                    for j in range(n):
                        re = fma(Cr[q, j], phr, -(Ci[q, j] * phi))
                        im = fma(Cr[q, j], phi, Ci[q, j] * phr)
                        Cr[q, j] = re
                        Ci[q, j] = im
                elif Cr[p, q] < 0.0:
                    for i in range(n):
                        Cr[i, q] = -Cr[i, q]
                    for j in range(n):
                        Cr[q, j] = -Cr[q, j]
                tau = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(fma(tau, tau, 1.0)))
                c = 1.0 / math.sqrt(fma(t, t, 1.0))
                s = t * c
                for i in range(n):
                    xp = Cr[i, p]
                    xq = Cr[i, q]
                    Cr[i, p] = c * xp - s * xq
                    Cr[i, q] = s * xp + c * xq
                    if is_cplx:
                        xp = Ci[i, p]
                        xq = Ci[i, q]
                        Ci[i, p] = c * xp - s * xq
                        Ci[i, q] = s * xp + c * xq
                for j in range(n):
                    xp = Cr[p, j]
                    xq = Cr[q, j]
                    Cr[p, j] = c * xp - s * xq
                    Cr[q, j] = s * xp + c * xq
                    if is_cplx:
                        xp = Ci[p, j]
                        xq = Ci[q, j]
                        Ci[p, j] = c * xp - s * xq
                        Ci[q, j] = s * xp + c * xq
        if rotated == 0:
            break
    return 0


def gevd_route(A, B, max_sweeps=30):
    """Eigenvalues of the definite pencil (A, B) via Cholesky reduction and a
    classical Jacobi eigensolver, sorted descending.

    Raises NotPositiveDefiniteError when B fails its Cholesky factorization,
    which is the expected failure mode once B is numerically indefinite."""
    Ar, Ai, is_cplx = _dense(np.array(A))
    Br, Bi, _ = _dense(np.array(B))
    if _k_cholesky_upper(Br, Bi, is_cplx) != 0:
        raise NotPositiveDefiniteError("B is numerically indefinite")
    _k_tri_solve_lower_left(Br, Bi, Ar, Ai, is_cplx)
    _k_tri_solve_upper_right(Ar, Ai, Br, Bi, is_cplx)
    # Hermitian part, exactly
    C = Ar + 1j * Ai if is_cplx else Ar
    C = 0.5 * (C + C.conj().T)
    Cr, Ci, _ = _dense(C)
    _k_jacobi_eig(Cr, Ci, is_cplx, max_sweeps)
    return np.sort(np.diag(Cr))[::-1].copy()


def pitfall_report(n, exponents, seed, field="real"):
    """Rows (kappa_B, mre_gsvd, mre_gevd) comparing the factored route with
    the assembled-Grammian eigenvalue route against a tightened reference."""
    ref_cfg = SolverConfig(variant_id=1, gate_eps=EPS / 4.0)
    cfg = SolverConfig(variant_id=0)
    rows = []
    for j in exponents:
        pair, A, B = gen_condition_pair(n, j, _derive(seed, 300 + j), field)
        ref = solve(pair.F, pair.G, ref_cfg).sigma
        got = solve(pair.F, pair.G, cfg).sigma
        mre_gsvd = max_rel_err(got, ref)
        try:
            lam = gevd_route(A, B)
            with np.errstate(invalid="ignore"):
                sig_g = np.sqrt(lam)
            mre_gevd = max_rel_err(sig_g, ref)
        except NotPositiveDefiniteError:
            mre_gevd = float("nan")
        rows.append((10.0 ** j, mre_gsvd, mre_gevd))
    return rows


def write_pitfall_tsv(rows, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("kappaB\tmre_gsvd\tmre_gevd\n")
        for (kb, mg, me_) in rows:
            fh.write("%.17g\t%.17g\t%.17g\n" % (kb, mg, me_))
