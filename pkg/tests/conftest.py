import numpy as np
import pytest

import hzgsvd as hz

CORPUS_SEED = 20260808

# sizes per field for the accuracy corpus: ten pairs spanning 64..256
CORPUS_SIZES = [64, 64, 64, 64, 128, 128, 128, 256, 256, 256]


def make_corpus(field, sizes=None, seed=CORPUS_SEED):
    """Deterministic list of (ProblemPair, reference sigma) for one field."""
    out = []
    for i, n in enumerate(sizes or CORPUS_SIZES):
        spec = hz.random_genspec(n, seed + 1000 * (field == "complex") + i,
                                 field)
        out.append(hz.gen_pair(spec))
    return out


@pytest.fixture(scope="session")
def corpus_real():
    return make_corpus("real")


@pytest.fixture(scope="session")
def corpus_complex():
    return make_corpus("complex")


@pytest.fixture(scope="session")
def small_pair():
    """One quick real pair reused by smoke-level tests."""
    spec = hz.random_genspec(32, CORPUS_SEED + 77)
    return hz.gen_pair(spec)


def pitfall_4x4_pair(g11=1e-10):
    """The 4x4 unit upper-triangular pair with a tiny leading G entry."""
    F = np.triu(np.ones((4, 4)))
    G = np.triu(np.ones((4, 4)))
    G[0, 0] = g11
    return F, G


def sorted_desc(x):
    return np.sort(np.asarray(x))[::-1].copy()


def rel_err_sorted(computed, reference):
    c = sorted_desc(computed)
    r = sorted_desc(reference)
    return np.abs(c - r) / np.abs(r)
