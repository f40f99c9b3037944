import math
from fractions import Fraction

import numpy as np
import pytest

import hzgsvd as hz


def test_config_decode():
    for vid in range(8):
        cfg = hz.SolverConfig(variant_id=vid)
        assert cfg.criterion == ("C1" if vid < 4 else "C2")
        assert cfg.prescale == (vid in (0, 1, 4, 5))
        assert cfg.compensated == (vid % 2 == 1)
    assert hz.SolverConfig(blocking="fb").max_inner_sweeps == 30
    assert hz.SolverConfig(blocking="bo").max_inner_sweeps == 1
    with pytest.raises(ValueError):
        hz.SolverConfig(variant_id=8)
    with pytest.raises(ValueError):
        hz.SweepStats(total=1, big=2)


def test_prescale_examples():
    F = hz.MatrixPlanePair.from_dense(np.eye(2))
    G = hz.MatrixPlanePair.from_dense(np.diag([5.0, 2.0]))
    F0, G0, z0 = hz.prescale_init(F, G, prescale=True)
    np.testing.assert_array_equal(z0, [0.2, 0.5])
    np.testing.assert_array_equal(G0.re, np.eye(2))
    np.testing.assert_array_equal(F0.re, np.diag([0.2, 0.5]))
    F0, G0, z0 = hz.prescale_init(F, G, prescale=False)
    np.testing.assert_array_equal(z0, [1.0, 1.0])
    np.testing.assert_array_equal(F0.re, np.eye(2))
    F0, G0, z0 = hz.prescale_init(F, hz.MatrixPlanePair.from_dense(np.eye(2)))
    np.testing.assert_array_equal(z0, [1.0, 1.0])
    with pytest.raises(hz.RankError):
        hz.prescale_init(F, hz.MatrixPlanePair.from_dense(np.diag([1.0, 0.0])))


def test_gsvd_1x1():
    r = hz.gsvd_1x1(hz.MatrixPlanePair.from_dense(np.array([[3.0]])),
                    hz.MatrixPlanePair.from_dense(np.array([[4.0]])))
    assert r.sigmaF[0] == 0.6 and r.sigmaG[0] == 0.8 and r.sigma[0] == 0.75
    assert r.Z.re[0, 0] == 0.2 and r.U.re[0, 0] == 1.0 and r.V.re[0, 0] == 1.0
    r = hz.gsvd_1x1(hz.MatrixPlanePair.from_dense(np.array([[1.0]])),
                    hz.MatrixPlanePair.from_dense(np.array([[1.0]])))
    assert r.sigma[0] == 1.0
    assert abs(r.sigmaF[0] - 1 / math.sqrt(2)) < 1e-16
    with pytest.raises(hz.RankError):
        hz.gsvd_1x1(hz.MatrixPlanePair.from_dense(np.array([[0.0]])),
                    hz.MatrixPlanePair.from_dense(np.array([[1.0]])))


def test_pointwise_identity_is_noop():
    F = hz.MatrixPlanePair.from_dense(np.eye(4))
    G = hz.MatrixPlanePair.from_dense(np.eye(4))
    Fp, Gp, Z, st, conv = hz.solve_pointwise(F, G)
    assert conv and st.total == 0 and st.big == 0
    np.testing.assert_array_equal(Z.re, np.eye(4))
    np.testing.assert_array_equal(Fp.re, np.eye(4))


def test_pointwise_svd_like_accumulation():
    Fd = np.array([[1.0, 1.0], [0.0, 1.0]])
    F = hz.MatrixPlanePair.from_dense(Fd)
    G = hz.MatrixPlanePair.from_dense(np.eye(2))
    Fp, Gp, Z, st, conv = hz.solve_pointwise(F, G)
    assert conv
    assert abs(np.dot(Fp.re[:, 0], Fp.re[:, 1])) < 4 * 2.0 ** -52 * 3
    # F' = F * Z exactly, via rational multiplication
    for i in range(2):
        for j in range(2):
            exact = sum(Fraction(Fd[i, k]) * Fraction(Z.re[k, j])
                        for k in range(2))
            assert abs(float(exact) - Fp.re[i, j]) <= \
                4 * 2.0 ** -52 * math.sqrt(2)


def test_pointwise_bo_cap():
    rng = np.random.default_rng(9)
    Fd = rng.standard_normal((6, 6))
    Gd = rng.standard_normal((6, 6)) + 3 * np.eye(6)
    cfg = hz.SolverConfig(blocking="bo")
    Fp, Gp, Z, st, conv = hz.solve_pointwise(
        hz.MatrixPlanePair.from_dense(Fd), hz.MatrixPlanePair.from_dense(Gd),
        cfg)
    assert st.total >= 1
    assert not conv


def test_pointwise_requires_even_n():
    F = hz.MatrixPlanePair.from_dense(np.eye(3))
    with pytest.raises(ValueError):
        hz.solve_pointwise(F, F)


def test_pointwise_orthogonalizes_complex():
    rng = np.random.default_rng(10)
    Fd = rng.standard_normal((8, 6)) + 1j * rng.standard_normal((8, 6))
    Gd = rng.standard_normal((8, 6)) + 1j * rng.standard_normal((8, 6)) \
        + 3 * np.vstack([np.eye(6), np.zeros((2, 6))])
    Fp, Gp, Z, st, conv = hz.solve_pointwise(
        hz.MatrixPlanePair.from_dense(Fd), hz.MatrixPlanePair.from_dense(Gd))
    assert conv
    Fc = Fp.to_dense()
    Gc = Gp.to_dense()
    for i in range(6):
        for j in range(i + 1, 6):
            den = np.linalg.norm(Fc[:, i]) * np.linalg.norm(Fc[:, j])
            assert abs(np.vdot(Fc[:, i], Fc[:, j])) / den < 1e-13
            assert abs(np.vdot(Gc[:, i], Gc[:, j])) < 1e-13


def test_pointwise_inner_theta_rescaling():
    rng = np.random.default_rng(11)
    Fd = rng.standard_normal((4, 4))
    Gd = rng.standard_normal((4, 4)) + 2 * np.eye(4)
    F = hz.MatrixPlanePair.from_dense(Fd)
    G = hz.MatrixPlanePair.from_dense(Gd)
    _, _, Zr, _, _ = hz.solve_pointwise(F, G, inner=False)
    Fp, Gp, Zt, _, _ = hz.solve_pointwise(F, G, inner=True)
    th = 1.0 / np.sqrt(np.sum(Fp.re ** 2, axis=0) + np.sum(Gp.re ** 2, axis=0))
    np.testing.assert_allclose(Zt.re, Zr.re * th[np.newaxis, :], rtol=1e-15)


def test_pointwise_converged_state_passes_gate():
    rng = np.random.default_rng(12)
    Fd = rng.standard_normal((8, 8))
    Gd = rng.standard_normal((8, 8)) + 3 * np.eye(8)
    Fp, Gp, Z, st, conv = hz.solve_pointwise(
        hz.MatrixPlanePair.from_dense(Fd), hz.MatrixPlanePair.from_dense(Gd))
    assert conv
    for i in range(8):
        for j in range(i + 1, 8):
            p = hz.form_pivot(Fp.re[:, i], Fp.re[:, j], Gp.re[:, i],
                              Gp.re[:, j])
            assert hz.relatively_orthogonal(hz.rescale_pivot(p), 8)


def test_step_pivot_order_is_bitwise_irrelevant():
    """Pivot pairs within a parallel step touch disjoint columns, so any
    processing order gives bitwise the same planes and counters."""
    from hzgsvd.pointwise import _k_process_pivot
    from hzgsvd.dotprod import _k_pow2
    rng = np.random.default_rng(13)
    m, n = 8, 8
    Fd = np.asfortranarray(rng.standard_normal((m, n)))
    Gd = np.asfortranarray(rng.standard_normal((m, n)) + 3 * np.eye(m, n))
    step = [(0, 5), (1, 3), (2, 7), (4, 6)]
    results = []
    for order in (step, step[::-1], [step[2], step[0], step[3], step[1]]):
        Fr = Fd.copy(order="F")
        Gr = Gd.copy(order="F")
        Zr = np.asfortranarray(np.eye(n))
        Fi = np.zeros_like(Fr)
        Gi = np.zeros_like(Gr)
        Zi = np.zeros_like(Zr)
        buf = np.empty(_k_pow2(m))
        cnt = [0, 0]
        for (i, j) in order:
            s, b, bad = _k_process_pivot(Fr, Fi, Gr, Gi, Zr, Zi, i, j, False,
                                         True, False, False, True,
                                         2.0 ** -52 * math.sqrt(n), buf)
            assert bad == 0
            cnt[0] += s
            cnt[1] += b
        results.append((Fr, Gr, Zr, tuple(cnt)))
    for (Fr, Gr, Zr, cnt) in results[1:]:
        assert np.array_equal(Fr, results[0][0])
        assert np.array_equal(Gr, results[0][1])
        assert np.array_equal(Zr, results[0][2])
        assert cnt == results[0][3]


def test_accumulation_identity():
    """F' equals F times the accumulated Z within 16 n ulp of the column
    scale, checked against exact rational products."""
    n = 8
    rng = np.random.default_rng(14)
    Fd = rng.standard_normal((n, n))
    Gd = rng.standard_normal((n, n)) + 3 * np.eye(n)
    Fp, Gp, Z, _st, conv = hz.solve_pointwise(
        hz.MatrixPlanePair.from_dense(Fd), hz.MatrixPlanePair.from_dense(Gd))
    assert conv
    bound = 16 * n * 2.0 ** -52
    for mat, prod in ((Fd, Fp), (Gd, Gp)):
        for j in range(n):
            exact = [float(sum(Fraction(mat[i, k]) * Fraction(Z.re[k, j])
                               for k in range(n))) for i in range(n)]
            err = np.linalg.norm(np.array(exact) - prod.re[:, j])
            scale = np.linalg.norm(np.abs(mat) @ np.abs(Z.re[:, j]))
            assert err <= bound * scale
