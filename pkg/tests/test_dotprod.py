import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import hzgsvd as hz
from hzgsvd._fp import fma, two_prod
from hzgsvd.harness import uniform_stream


def tree_oracle(values):
    """Independent pairwise-tree evaluation via explicit recursion."""
    vals = [float(v) for v in values]
    m = 1
    while m < len(vals):
        m *= 2
    vals = vals + [0.0] * (m - len(vals))

    def red(lo, hi):
        if hi - lo == 1:
            return vals[lo]
        mid = (lo + hi) // 2
        return red(lo, mid) + red(mid, hi)

    return red(0, m)


def test_fma_is_fused():
    x = float(2 ** 27 + 1)
    assert fma(x, x, -(2.0 ** 54 + 2.0 ** 28)) == 1.0


def test_two_prod_exact():
    p, e = two_prod(float(2 ** 27 + 1), float(2 ** 27 + 1))
    assert p == 2.0 ** 54 + 2.0 ** 28 and e == 1.0


def test_tree_reduce_examples():
    assert hz.tree_reduce(np.arange(1.0, 33.0)) == 528.0
    assert hz.tree_reduce([3.25]) == 3.25
    # the tree value of [1e16, 1, 1, 0] is (1e16+1)+(1+0); 1e16+1 ties to even
    vals = [1e16, 1.0, 1.0, 0.0]
    expect = (1e16 + 1.0) + (1.0 + 0.0)
    got = hz.tree_reduce(vals)
    assert got == expect == tree_oracle(vals)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e300, 1e300, allow_nan=False), min_size=1,
                max_size=70))
def test_tree_reduce_matches_oracle_and_repeats(vals):
    a = hz.tree_reduce(vals)
    b = hz.tree_reduce(vals)
    assert a == b or (math.isnan(a) and math.isnan(b))
    assert a == tree_oracle(vals) or math.isnan(a)


def test_dot_ordinary_examples():
    assert hz.dot_ordinary([1, 2, 3], [4, 5, 6]) == 32.0
    a = np.array([3 + 4j])
    assert hz.dot_ordinary(a, a, field="complex") == 25.0 + 0j
    a = np.array([1 + 1j, 1 - 1j])
    b = np.array([1 + 0j, 1j])
    got = hz.dot_ordinary(a, b, field="complex")
    # rational cross-check: (1-i)*1 + (1+i)*i = 0
    er = Fraction(0)
    ei = Fraction(0)
    for x, y in zip(a.tolist(), b.tolist()):
        er += Fraction(x.real) * Fraction(y.real) + Fraction(x.imag) * Fraction(y.imag)
        ei += Fraction(x.real) * Fraction(y.imag) - Fraction(x.imag) * Fraction(y.real)
    assert got == complex(float(er), float(ei)) == 0j


def test_dot_errors():
    with pytest.raises(ValueError):
        hz.dot_ordinary([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        hz.dot_compensated([1.0, 2.0], [1.0])


def test_dot_compensated_recovers_cancelled_low_bit():
    # the exact value 2^54 + 2^28 + 1 is not a binary64, so exactness is
    # shown where the result is representable: the big parts cancel and the
    # ordinary path has already lost the residual 1
    x = 2.0 ** 27 + 1.0
    a = [x, 1.0]
    b = [x, -(2.0 ** 54 + 2.0 ** 28)]
    assert hz.dot_ordinary(a, b) == 0.0
    assert hz.dot_compensated(a, b) == 1.0
    exact = Fraction(2 ** 27 + 1) ** 2 - Fraction(2 ** 54 + 2 ** 28)
    assert exact == 1


def test_dot_compensated_square_is_correctly_rounded():
    x = 2.0 ** 27 + 1.0
    exact = (2 ** 27 + 1) ** 2
    got = hz.dot_compensated([x], [x])
    assert got == float(exact)  # nearest binary64 to the exact square
    assert hz.dot_ordinary([x], [x]) == float(exact)
    c = complex(x, 0.0)
    assert hz.dot_compensated([c], [c], field="complex") == complex(float(exact), 0.0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(-999, 999), st.integers(-999, 999)),
                min_size=1, max_size=64))
def test_compensated_equals_ordinary_on_exact_inputs(pairs):
    # small-integer products and sums are exact, so all residuals vanish
    a = [float(x) for x, _ in pairs]
    b = [float(y) for _, y in pairs]
    assert hz.dot_compensated(a, b) == hz.dot_ordinary(a, b)


def test_norm_sq_examples():
    assert hz.norm_sq([3.0, 4.0]) == 25.0
    assert hz.norm_sq([3 + 4j], field="complex") == 25.0
    x = 2.0 ** 27 + 1.0
    assert hz.norm_sq([x], compensated=True) == float((2 ** 27 + 1) ** 2)
    assert hz.norm_sq([x, 0.5], compensated=True) == \
        hz.dot_compensated([x, 0.5], [x, 0.5])


def test_norm_sq_nonnegative_on_random_corpus():
    for trial in range(10000):
        u = uniform_stream(5000 + trial, 8) * 2.0 - 1.0
        assert hz.norm_sq(u, compensated=True) >= 0.0
        assert hz.norm_sq(u) >= 0.0


def _ulps_off(computed, exact):
    fl = float(exact)
    if fl == 0.0:
        return 0.0 if computed == 0.0 else math.inf
    return abs(computed - fl) / math.ulp(fl)


def test_compensated_against_rational_oracle():
    """Real compensated dots stay within 1 ulp of the exact value on 1000
    random vectors.  The complex parts combine two compensated real sums
    through the simplified rule, whose rounding is a couple of ulp of the
    larger part magnitude (relative accuracy degrades only when the two
    parts cancel, by design of the speed/accuracy trade-off)."""
    worst = 0.0
    worst_c = 0.0
    for trial in range(1000):
        ln = 1 + int(uniform_stream(90000 + trial, 1)[0] * 64)
        u = uniform_stream(91000 + trial, 4 * ln)
        a = (u[:ln] * 2 - 1) * np.exp2(np.floor(u[2 * ln:3 * ln] * 61 - 30))
        b = (u[ln:2 * ln] * 2 - 1) * np.exp2(np.floor(u[3 * ln:] * 61 - 30))
        got = hz.dot_compensated(a, b)
        exact = sum(Fraction(x) * Fraction(y)
                    for x, y in zip(a.tolist(), b.tolist()))
        worst = max(worst, _ulps_off(got, exact))
        if trial % 5 == 0:
            ac = a + 1j * (u[ln:2 * ln] * 2 - 1)
            bc = b + 1j * (u[:ln] * 2 - 1)
            gc = hz.dot_compensated(ac, bc, field="complex")
            er = sum(Fraction(x.real) * Fraction(y.real) +
                     Fraction(x.imag) * Fraction(y.imag)
                     for x, y in zip(ac.tolist(), bc.tolist()))
            ei = sum(Fraction(x.real) * Fraction(y.imag) -
                     Fraction(x.imag) * Fraction(y.real)
                     for x, y in zip(ac.tolist(), bc.tolist()))
            # scale: the larger of the two real part-sums feeding each result
            sc_re = max(abs(float(sum(Fraction(x.real) * Fraction(y.real)
                                      for x, y in zip(ac.tolist(), bc.tolist())))),
                        abs(float(er)), 1e-300)
            err_re = abs(gc.real - float(er)) / math.ulp(sc_re)
            err_im = abs(gc.imag - float(ei)) / math.ulp(
                max(abs(float(ei)), sc_re))
            worst_c = max(worst_c, err_re, err_im)
    assert worst <= 1.0
    assert worst_c <= 4.0


def test_compensated_accumulator_rule():
    from hzgsvd.dotprod import _k_comp_combine
    acc = hz.CompensatedAccumulator(c_r=2.0, c_i=-1.0, d_r=2.0 ** -53,
                                    d_i=-(2.0 ** -55))
    assert acc.combined() == _k_comp_combine(2.0, -1.0, 2.0 ** -53,
                                             -(2.0 ** -55))
    real = hz.CompensatedAccumulator(c_r=5.0, d_r=0.125)
    assert real.c_i == 0.0 and real.d_i == 0.0
    assert real.combined() == 5.125
