"""Deterministic in-process simulation of the multi-worker solver.

The columns are cut into 2s stripes; worker r starts with the two stripes
paired by step 0 of the outermost strategy table and keeps them physically
joined, first stripe in the left half of its slab.  An outermost step runs
the single-process sweep loop on each worker's joined slab, then exchanges
stripes along the precomputed communication mapping: every worker emits one
tagged message per stripe plane (tags 1..6 for the real field, 1..12 for the
complex one: base tag over {F, G, Z} x {Re, Im}, plus an offset when the
stripe becomes the second slot at its destination) and accepts exactly one
message per tag.  A sweep ends with an ordered all-reduce of the big-
transformation counters; the run stops when their sum is zero.

Workers may execute an outermost step on a thread pool or sequentially; the
per-step barrier and the tag protocol make the result identical either way.
A single worker degenerates to the plain blocked solver, which is then called
directly.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .blocked import _algorithm1_loop, _k_rescale_full, gsvd_blocked
from .core import GsvdResult, MatrixPlanePair
from .errors import ProtocolError, RankError
from .pointwise import SolverConfig, _k_prescale
from .strategies import comm_mapping, gen_table


@dataclass
class StripeState:
    """A worker's two joined stripes of F, G, and Z plus their global ids."""

    rank: int
    p: int
    q: int
    width: int
    Fr: np.ndarray
    Fi: Optional[np.ndarray]
    Gr: np.ndarray
    Gi: Optional[np.ndarray]
    Zr: np.ndarray
    Zi: Optional[np.ndarray]
    is_complex: bool = False


@dataclass
class StripeMessage:
    tag: int
    payload: np.ndarray
    source: int


_PLANE_ORDER = ("F.re", "F.im", "G.re", "G.im", "Z.re", "Z.im")
_PLANE_ORDER_REAL = ("F.re", "G.re", "Z.re")


def partition_stripes(p, s, block_width=1, kind="me"):
    """Cut the bordered pair into 2s stripes and hand worker r the two
    stripes of the outermost strategy's step 0."""
    n = p.n
    if n % (2 * s) != 0:
        raise ValueError("n=%d is not divisible into 2*%d stripes" % (n, s))
    width = n // (2 * s)
    if width % block_width != 0:
        raise ValueError(
            "stripe width %d is not a multiple of the block width %d"
            % (width, block_width))
    table = gen_table(kind, 2 * s)
    states = []
    is_cplx = p.is_complex
    for r in range(s):
        sp, sq = table.steps[0][r]

        def slab(m):
            re = np.hstack([m.re[:, sp * width:(sp + 1) * width],
                            m.re[:, sq * width:(sq + 1) * width]])
            re = np.asfortranarray(re)
            if is_cplx:
                im = np.hstack([m.im[:, sp * width:(sp + 1) * width],
                                m.im[:, sq * width:(sq + 1) * width]])
                return re, np.asfortranarray(im)
            return re, np.zeros_like(re, order="F")

        Fr, Fi = slab(p.F)
        Gr, Gi = slab(p.G)
        Zr = np.zeros((n, 2 * width), order="F")
        Zi = np.zeros((n, 2 * width), order="F")
        states.append(StripeState(r, sp, sq, width, Fr, Fi, Gr, Gi, Zr, Zi,
                                  is_cplx))
    return states


def _plane_of(state, name):
    return {"F.re": state.Fr, "F.im": state.Fi, "G.re": state.Gr,
            "G.im": state.Gi, "Z.re": state.Zr, "Z.im": state.Zi}[name]


def exchange_step(states, mapping, k):
    """Perform the tagged stripe exchange for step k; stripe ids advance to
    step (k+1) mod steps."""
    s = len(states)
    is_cplx = states[0].is_complex
    order = _PLANE_ORDER if is_cplx else _PLANE_ORDER_REAL
    half = 6 if is_cplx else 3
    inbox = {}
    for st in states:
        p, q, t0, t1 = mapping.entries[k][st.rank]
        if (p, q) != (st.p, st.q):
            raise ProtocolError(
                "worker %d holds stripes (%d, %d) but the mapping says (%d, %d)"
                % (st.rank, st.p, st.q, p, q))
        for slot, enc in ((0, t0), (1, t1)):
            dest = abs(enc) - 1
            offset = 0 if enc < 0 else half
            lo = slot * st.width
            hi = lo + st.width
            base = 1
            for name in order:
                payload = _plane_of(st, name)[:, lo:hi].copy()
                tag = base + offset
                key = (dest, tag)
                if key in inbox:
                    raise ProtocolError(
                        "duplicate tag %d at worker %d" % (tag, dest))
                inbox[key] = StripeMessage(tag, payload, st.rank)
                base += 1
    for st in states:
        for tag in range(1, 2 * half + 1):
            key = (st.rank, tag)
            if key not in inbox:
                raise ProtocolError(
                    "missing tag %d at worker %d" % (tag, st.rank))
            msg = inbox.pop(key)
            slot = 0 if tag <= half else 1
            name = order[(tag - 1) % half]
            lo = slot * st.width
            _plane_of(st, name)[:, lo:lo + st.width] = msg.payload
        st.p, st.q = mapping.entries[(k + 1) % mapping.steps][st.rank][:2]
    return states


def run_distributed(p, cfg=None, s=2, s_inner=1, pool=1):
    """Distributed solve of a bordered pair with s workers.

    With a single worker the plain blocked solver is already sufficient and
    is used directly.  ``s_inner`` caps the sweeps of each worker's inner
    driver per outermost step (1 keeps the workers in lockstep).
    """
    cfg = cfg or SolverConfig()
    if s < 1:
        raise ValueError("need at least one worker")
    if s == 1:
        r = gsvd_blocked(p, cfg)
        r.workers = 1
        return r
    n = p.n
    w = cfg.block_width
    if n % (2 * w * s) != 0:
        raise ValueError("n=%d not divisible for %d workers at block width %d"
                         % (n, s, w))
    is_cplx = p.is_complex
    table = gen_table(cfg.outer_kind, 2 * s)
    mapping = comm_mapping(table)
    states = partition_stripes(p, s, w, cfg.outer_kind)
    width = states[0].width
    # per-worker prescaling with the initial Z diagonal at logical rows
    for st in states:
        z0 = np.ones(2 * width)
        if cfg.prescale:
            if _k_prescale(st.Fr, st.Fi, st.Gr, st.Gi, z0, is_cplx,
                           cfg.compensated) != 0:
                raise RankError("zero G column during prescaling")
        for j in range(2 * width):
            stripe = st.p if j < width else st.q
            logical = stripe * width + (j % width)
            st.Zr[logical, j] = z0[j]
    epsn = cfg.gate_eps * math.sqrt(n)
    total = 0
    big = 0
    sweeps = 0
    converged = False

    def worker_step(st):
        return _algorithm1_loop(st.Fr, st.Fi, st.Gr, st.Gi, st.Zr, st.Zi,
                                is_cplx, cfg, s_inner, epsn,
                                trailing_rescale=True)

    executor = ThreadPoolExecutor(max_workers=pool) if pool > 1 else None
    try:
        for _c in range(30):
            shat = [0] * s
            bhat = [0] * s
            for k in range(len(table.steps)):
                if executor is not None:
                    results = list(executor.map(worker_step, states))
                else:
                    results = [worker_step(st) for st in states]
                for r_, (_sw, t, b, _cv) in enumerate(results):
                    shat[r_] += t
                    bhat[r_] += b
                exchange_step(states, mapping, k)
            sweeps += 1
            b_all = 0
            for r_ in range(s):
                total += shat[r_]
                b_all += bhat[r_]
            big += b_all
            if b_all == 0:
                converged = True
                break
    finally:
        if executor is not None:
            executor.shutdown()
    # final rescaling and extraction, per worker, then reassembly
    mF = p.F.rows
    mG = p.G.rows
    Ur = np.zeros((mF, n), order="F")
    Ui = np.zeros((mF, n), order="F")
    Vr = np.zeros((mG, n), order="F")
    Vi = np.zeros((mG, n), order="F")
    Zr = np.zeros((n, n), order="F")
    Zi = np.zeros((n, n), order="F")
    sigF = np.zeros(n)
    sigG = np.zeros(n)
    sig = np.zeros(n)
    for st in states:
        lf = np.zeros(2 * width)
        lg = np.zeros(2 * width)
        ls = np.zeros(2 * width)
        if _k_rescale_full(st.Fr, st.Fi, st.Gr, st.Gi, st.Zr, st.Zi, is_cplx,
                           cfg.compensated, True, lf, lg, ls) != 0:
            raise RankError("zero column at extraction on worker %d" % st.rank)
        for slot, stripe in ((0, st.p), (1, st.q)):
            lo = slot * width
            g0 = stripe * width
            Ur[:, g0:g0 + width] = st.Fr[:, lo:lo + width]
            Vr[:, g0:g0 + width] = st.Gr[:, lo:lo + width]
            Zr[:, g0:g0 + width] = st.Zr[:, lo:lo + width]
            if is_cplx:
                Ui[:, g0:g0 + width] = st.Fi[:, lo:lo + width]
                Vi[:, g0:g0 + width] = st.Gi[:, lo:lo + width]
                Zi[:, g0:g0 + width] = st.Zi[:, lo:lo + width]
            sigF[g0:g0 + width] = lf[lo:lo + width]
            sigG[g0:g0 + width] = lg[lo:lo + width]
            sig[g0:g0 + width] = ls[lo:lo + width]

    def wrap(re, im):
        if is_cplx:
            return MatrixPlanePair(re.shape[0], re.shape[1], re, im, True)
        return MatrixPlanePair(re.shape[0], re.shape[1], re, None, False)

    return GsvdResult(wrap(Ur, Ui), wrap(Vr, Vi), wrap(Zr, Zi), sigF, sigG,
                      sig, sweeps=sweeps, total_transforms=total,
                      big_transforms=big, converged=converged, workers=s)
