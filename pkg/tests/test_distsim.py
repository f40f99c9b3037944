import numpy as np
import pytest

import hzgsvd as hz
from conftest import pitfall_4x4_pair, rel_err_sorted


def _bordered(F, G, w=8, s=1):
    p = hz.ProblemPair(hz.MatrixPlanePair.from_dense(F),
                       hz.MatrixPlanePair.from_dense(G))
    return hz.border_pair(p, 2 * w * max(s, 1), 2 * w)


def _random_pair(n, seed, field="real"):
    pair, _ = hz.gen_pair(hz.random_genspec(n, seed, field))
    return pair


def test_partition_examples():
    pair = _random_pair(8, 50)
    states = hz.partition_stripes(pair, 2, block_width=2)
    assert [s.rank for s in states] == [0, 1]
    t = hz.gen_table("me", 4)
    assert (states[0].p, states[0].q) == t.steps[0][0]
    assert (states[1].p, states[1].q) == t.steps[0][1]
    assert states[0].width == 2
    one = hz.partition_stripes(pair, 1, block_width=2)
    assert len(one) == 1 and (one[0].p, one[0].q) == (0, 1)
    with pytest.raises(ValueError):
        hz.partition_stripes(_random_pair(6, 51), 2, block_width=1)


def test_exchange_self_sends():
    pair = _random_pair(8, 52)
    states = hz.partition_stripes(pair, 1, block_width=2)
    before = states[0].Fr.copy()
    mapping = hz.comm_mapping(hz.gen_table("me", 2))
    hz.exchange_step(states, mapping, 0)
    assert np.array_equal(states[0].Fr, before)
    assert (states[0].p, states[0].q) == (0, 1)


def test_exchange_tag_arithmetic_real():
    """A first-slot destination keeps the base tags 1..3; rank 1 encodes -2."""
    pair = _random_pair(16, 53)
    states = hz.partition_stripes(pair, 2, block_width=2)
    t = hz.gen_table("me", 4)
    mapping = hz.comm_mapping(t)
    p, q, t0, t1 = mapping.entries[0][0]
    assert (p, q) == t.steps[0][0]
    assert abs(t0) in (1, 2) and abs(t1) in (1, 2)
    enc = [e for row in mapping.entries for (_p, _q, a, b) in row for e in (a, b)]
    assert -2 in enc


def test_exchange_routing_matches_table():
    for kind in ("me", "mm"):
        pair = _random_pair(16, 54)
        states = hz.partition_stripes(pair, 2, block_width=2, kind=kind)
        t = hz.gen_table(kind, 4)
        mapping = hz.comm_mapping(t)
        # tag each stripe's first entry with its global id, run a full sweep
        # of exchanges with identity compute, and track the occupancy
        width = states[0].width
        for st in states:
            st.Fr[0, 0] = 1000.0 + st.p
            st.Fr[0, width] = 1000.0 + st.q
        for k in range(len(t.steps)):
            hz.exchange_step(states, mapping, k)
            kk = (k + 1) % len(t.steps)
            for r, st in enumerate(states):
                assert (st.p, st.q) == t.steps[kk][r]
                assert st.Fr[0, 0] == 1000.0 + st.p
                assert st.Fr[0, width] == 1000.0 + st.q
        # after a whole sweep every stripe is back at its step-0 position
        for r, st in enumerate(states):
            assert (st.p, st.q) == t.steps[0][r]


def test_exchange_protocol_violation():
    pair = _random_pair(16, 55)
    states = hz.partition_stripes(pair, 2, block_width=2)
    mapping = hz.comm_mapping(hz.gen_table("me", 4))
    states[0].p, states[0].q = states[0].q, states[0].p
    with pytest.raises(hz.ProtocolError):
        hz.exchange_step(states, mapping, 0)


def test_distributed_single_worker_delegates():
    pair = _random_pair(32, 56)
    pb = hz.border_pair(pair, 16, 16)
    cfg = hz.SolverConfig()
    a = hz.run_distributed(pb, cfg, 1, 30)
    b = hz.gsvd_blocked(pb, cfg)
    assert np.array_equal(a.sigma, b.sigma)
    assert np.array_equal(a.Z.re, b.Z.re)
    assert np.array_equal(a.U.re, b.U.re)


@pytest.mark.parametrize("field", ["real", "complex"])
def test_distributed_parity(field):
    pair = _random_pair(64, 57, field)
    cfg = hz.SolverConfig()
    base = hz.solve(pair.F, pair.G, cfg)
    for s in (2, 4):
        r = hz.solve(pair.F, pair.G, cfg, workers=s, worker_sweeps=1)
        assert r.workers == s
        assert r.converged and r.sweeps <= 30
        assert rel_err_sorted(r.sigma, base.sigma).max() <= 1e-10


def test_distributed_pitfall_4x4_pair():
    F, G = pitfall_4x4_pair()
    cfg = hz.SolverConfig(block_width=1)
    r = hz.solve(F, G, cfg, workers=2)
    expect = [1.414213562302384e10, 9.999999999999997e-1,
              9.999999999999997e-1, 7.071067812219032e-1]
    assert rel_err_sorted(r.sigma, expect).max() <= 1e-10


def test_distributed_deterministic_and_pool_invariant():
    pair = _random_pair(64, 58)
    pb = hz.border_pair(pair, 32, 16)
    cfg = hz.SolverConfig()
    a = hz.run_distributed(pb, cfg, 2, 1)
    b = hz.run_distributed(pb, cfg, 2, 1)
    c = hz.run_distributed(pb, cfg, 2, 1, pool=2)
    assert np.array_equal(a.sigma, b.sigma) and np.array_equal(a.Z.re, b.Z.re)
    assert np.array_equal(a.sigma, c.sigma) and np.array_equal(a.Z.re, c.Z.re)


def test_distributed_residuals():
    pair = _random_pair(64, 59)
    r = hz.solve(pair.F, pair.G, hz.SolverConfig(), workers=2)
    rep = hz.accuracy_report(pair, r)
    assert rep.resF <= 1e-12 and rep.resG <= 1e-12
    assert np.abs(r.sigmaF ** 2 + r.sigmaG ** 2 - 1.0).max() <= 1e-14


def test_distributed_with_bordering():
    pair, ref = hz.gen_pair(hz.random_genspec(20, 92, "complex"))
    cfg = hz.SolverConfig(block_width=2)
    base = hz.solve(pair.F, pair.G, cfg)
    r = hz.solve(pair.F, pair.G, cfg, workers=2)
    assert r.sigma.size == 20
    assert rel_err_sorted(r.sigma, base.sigma).max() <= 1e-10


def test_distributed_mm_outer_kind():
    pair = _random_pair(64, 60)
    cfg = hz.SolverConfig(outer_kind="mm")
    base = hz.solve(pair.F, pair.G, cfg)
    r = hz.solve(pair.F, pair.G, cfg, workers=2)
    assert r.converged
    assert rel_err_sorted(r.sigma, base.sigma).max() <= 1e-10


def test_distributed_kitchen_sink():
    # variant 7 (C2, per-pivot rescale, compensated), mm/mm, bo blocking,
    # complex field, two workers, bordered
    pair, ref = hz.gen_pair(hz.random_genspec(24, 93, "complex"))
    cfg = hz.SolverConfig(variant_id=7, outer_kind="mm", inner_kind="mm",
                          blocking="bo", block_width=2)
    r = hz.solve(pair.F, pair.G, cfg, workers=2)
    assert r.converged and r.sigma.size == 24
    rep = hz.accuracy_report(pair, r, ref)
    assert rep.max_rel_sigma < 1e-11 and rep.resF < 1e-12
