"""Shared strategies and brute-force oracles.

The oracles below use only itertools and Python sets, so they share no code
path with the numpy engine they check.
"""

import itertools

from hypothesis import strategies as st

from apxgrp.group import GroupSpec, PointSet

Z = GroupSpec((), 1)
Z2 = GroupSpec((), 2)


def pts(spec, *points):
    return PointSet.of(spec, *points)


def brute_sum(spec, S, T):
    m = spec.ntorsion
    out = set()
    for s in S:
        for t in T:
            tor = tuple((a + b) % d for a, b, d in zip(s[:m], t[:m], spec.moduli))
            out.add(tor + tuple(a + b for a, b in zip(s[m:], t[m:])))
    return out


def brute_hfold(spec, A, h):
    A = [tuple(a) for a in A]
    cur = set(A)
    for _ in range(h - 1):
        cur = brute_sum(spec, cur, A)
    return cur


def brute_covers(spec, A, r, h, X):
    U = brute_hfold(spec, A, r * h)
    return U <= brute_sum(spec, X, brute_hfold(spec, A, h))


def brute_minimal_size(spec, A, r, h):
    """Smallest cover size by trying every subset of the difference set in order of size."""
    H = brute_hfold(spec, A, h)
    U = brute_hfold(spec, A, r * h)
    m = spec.ntorsion
    cands = set()
    for u in U:
        for y in H:
            tor = tuple((a - b) % d for a, b, d in zip(u[:m], y[:m], spec.moduli))
            cands.add(tor + tuple(a - b for a, b in zip(u[m:], y[m:])))
    cover = {x: frozenset(brute_sum(spec, [x], H) & U) for x in cands}
    cands = sorted(cands)
    for size in itertools.count(1):
        for combo in itertools.combinations(cands, size):
            if frozenset().union(*(cover[x] for x in combo)) >= U:
                return size


def point_sets(spec, max_size=5, lo=-4, hi=4, min_size=1):
    """Hypothesis strategy for small PointSets of ``spec``."""
    coord = [st.integers(0, d - 1) for d in spec.moduli] + [st.integers(lo, hi)] * spec.rank
    point = st.tuples(*coord)
    return st.lists(point, min_size=min_size, max_size=max_size).map(lambda ps: PointSet.from_rows(spec, ps))
