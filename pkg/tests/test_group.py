import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from apxgrp.errors import EmptySetError, GroupOverflowError, SpecMismatchError
from apxgrp.group import GroupSpec, PointSet, add, canonicalize, scale, whole_torsion_group

Z = GroupSpec((), 1)
Z2 = GroupSpec((), 2)
Z6Z = GroupSpec((6,), 1)
Z6 = GroupSpec((6,), 0)


def test_add_examples():
    assert add(Z6Z.element((4, 3)), Z6Z.element((5, -1))).coords == (3, 2)
    assert add(Z6Z.identity(), Z6Z.element((4, 3))).coords == (4, 3)
    assert add(Z2.element((1, 0)), Z2.element((0, 1))).coords == (1, 1)


def test_add_errors():
    with pytest.raises(SpecMismatchError):
        add(Z.element((1,)), Z2.element((1, 0)))
    big = Z.element((2**62,))
    with pytest.raises(GroupOverflowError):
        add(big, big)


def test_scale_examples():
    assert scale(Z.element((2,)), 3).coords == (6,)
    assert scale(Z6.element((2,)), 3).coords == (0,)
    g = Z6Z.element((5, -7))
    assert scale(g, 0).is_identity()
    assert scale(g, -1) == -g
    with pytest.raises(GroupOverflowError):
        scale(Z.element((2**40,)), 2**40)


def test_spec_validation():
    with pytest.raises(ValueError):
        GroupSpec((1,), 0)
    with pytest.raises(ValueError):
        GroupSpec((), -1)
    T = GroupSpec((), 0)
    assert T.is_trivial and T.torsion_order == 1
    assert len(whole_torsion_group(T)) == 1


def test_canonicalize_examples():
    S = canonicalize([Z2.element(p) for p in [(1, 0), (0, 1), (1, 0)]], Z2)
    assert S.tuples() == [(0, 1), (1, 0)]
    assert canonicalize(list(S), Z2) == S
    with pytest.raises(EmptySetError):
        canonicalize([], Z2)
    assert len(canonicalize([], Z2, nonempty=False)) == 0


def test_order_torsion_first():
    S = PointSet.of(Z6Z, (1, -5), (0, 9), (1, -6), (7, 0))
    assert S.tuples() == [(0, 9), (1, -6), (1, -5), (1, 0)]


def test_json_roundtrip_and_digest():
    S = PointSet.of(Z6Z, (1, -5), (0, 9))
    T = PointSet.from_json(S.to_json())
    assert T == S and T.digest() == S.digest()
    with pytest.raises(ValueError):
        PointSet.from_json({"group": {"moduli": [6], "rank": 1}, "points": [[1]]})


def test_rows_are_read_only():
    S = PointSet.of(Z, 0, 1)
    with pytest.raises(ValueError):
        S.rows[0, 0] = 5


def test_group_laws_sampled():
    rng = random.Random(0)
    spec = GroupSpec((4, 6), 2)

    def rand():
        return spec.element([rng.randrange(4), rng.randrange(6), rng.randint(-10**6, 10**6), rng.randint(-10**6, 10**6)])

    for _ in range(10_000):
        a, b, c = rand(), rand(), rand()
        assert a + b == b + a
        assert (a + b) + c == a + (b + c)
        assert a + (-a) == spec.identity()


@given(
    st.tuples(st.integers(0, 3), st.integers(0, 5), st.integers(-1000, 1000)),
    st.integers(-50, 50),
    st.integers(-50, 50),
)
def test_scale_additive(coords, s, t):
    a = GroupSpec((4, 6), 1).element(coords)
    assert scale(a, s + t) == add(scale(a, s), scale(a, t))


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(-9, 9)), max_size=12), st.randoms())
def test_canonicalize_order_insensitive(points, rnd):
    shuffled = list(points)
    rnd.shuffle(shuffled)
    a = canonicalize([Z6Z.element(p) for p in points], Z6Z, nonempty=False)
    b = canonicalize([Z6Z.element(p) for p in shuffled], Z6Z, nonempty=False)
    assert a == b
    assert np.array_equal(a.rows, b.rows)
