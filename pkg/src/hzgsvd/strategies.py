"""Parallel Jacobi strategy tables and the communication mapping.

Two strategy kinds are provided for even orders n:

* ``me`` -- the generalized Mantharam-Eberlein cyclic ordering, built here by
  the round-robin tournament rotation: n - 1 steps, every unordered pair
  exactly once per sweep.
* ``mm`` -- a modified modulus ordering: n steps, quasi-cyclic (every pair at
  least once per sweep).  Step k pairs indices with i + j = k (mod n); for
  even k the two fixed points of that involution, k/2 and k/2 + n/2, are
  paired with each other.

Tables are pure functions of (kind, n).  For distributed runs the mapping of
stripes between consecutive steps is extracted by brute-force comparison of
the step rows; destinations are encoded as +-(rank + 1), negative for the
first slot at the destination and positive for the second.
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np


@dataclass
class StrategyTable:
    order: int
    kind: str
    steps: List[List[Tuple[int, int]]]

    def as_array(self):
        """Steps as an int32 array of shape (steps, order//2, 2)."""
        return np.asarray(self.steps, dtype=np.int32)


@dataclass
class CommMapping:
    """entries[k][r] = (p, q, t0, t1) for step k and holder r."""

    order: int
    steps: int
    entries: List[List[Tuple[int, int, int, int]]]


def gen_table(kind, n):
    """Generate the strategy table of the given kind for even n >= 2."""
    if n < 2 or n % 2 != 0:
        raise ValueError("strategy order must be even and at least 2, got %r" % (n,))
    kind = kind.lower()
    if kind == "me":
        steps = _tournament(n)
    elif kind == "mm":
        steps = _modified_modulus(n)
    else:
        raise ValueError("unknown strategy kind %r" % (kind,))
    return StrategyTable(n, kind, steps)


def _tournament(n):
    others = list(range(1, n))
    steps = []
    for _ in range(n - 1):
        line = [0] + others
        pairs = []
        for i in range(n // 2):
            a, b = line[i], line[n - 1 - i]
            pairs.append((a, b) if a < b else (b, a))
        steps.append(sorted(pairs))
        others = others[-1:] + others[:-1]
    return steps


def _modified_modulus(n):
    steps = []
    for k in range(n):
        pairs = []
        seen = set()
        for i in range(n):
            if i in seen:
                continue
            j = (k - i) % n
            if j == i or j in seen:
                continue
            seen.add(i)
            seen.add(j)
            pairs.append((i, j) if i < j else (j, i))
        if k % 2 == 0:
            a = k // 2
            b = a + n // 2
            if a not in seen:
                pairs.append((a, b) if a < b else (b, a))
        steps.append(sorted(pairs))
    return steps


def validate_table(t):
    """Exhaustively check disjointness, coverage, and cyclicity."""
    n = t.order
    all_pairs = {(i, j) for i in range(n) for j in range(i + 1, n)}
    seen = []
    disjoint_ok = True
    for step in t.steps:
        used = set()
        for (i, j) in step:
            if i in used or j in used or not (0 <= i < j < n):
                disjoint_ok = False
            used.add(i)
            used.add(j)
        if len(step) != n // 2:
            disjoint_ok = False
        seen.extend(step)
    coverage_ok = set(seen) == all_pairs
    cyclic = coverage_ok and len(seen) == len(all_pairs)
    return {"cyclic": cyclic, "coverage_ok": coverage_ok, "disjoint_ok": disjoint_ok}


def comm_mapping(t):
    """Route each holder's two stripes to the holders that need them next.

    Worker r in step k holds the r-th pair of that step.  For both stripes the
    destination in step (k+1) mod s is found by scanning the next step's pairs;
    rank d targeted at its first slot encodes as -(d+1), second slot as +(d+1).
    """
    s = len(t.steps)
    half = t.order // 2
    entries = []
    for k in range(s):
        nxt = t.steps[(k + 1) % s]
        row = []
        for r in range(half):
            p, q = t.steps[k][r]
            row.append((p, q, _dest(nxt, p), _dest(nxt, q)))
        entries.append(row)
    return CommMapping(t.order, s, entries)


def _dest(step, stripe):
    for rank, (i, j) in enumerate(step):
        if i == stripe:
            return -(rank + 1)
        if j == stripe:
            return rank + 1
    raise ValueError("stripe %d absent from step %r" % (stripe, step))


def dump_table(t, mapping=None):
    """Text form: one step per line, pairs as i-j, space separated."""
    lines = []
    for k, step in enumerate(t.steps):
        lines.append(" ".join("%d-%d" % (i, j) for (i, j) in step))
        if mapping is not None:
            lines.append("  " + " ".join(
                "r%d:p%d,q%d,t0=%+d,t1=%+d" % (r, p, q, t0, t1)
                for r, (p, q, t0, t1) in enumerate(mapping.entries[k])))
    return "\n".join(lines) + "\n"
