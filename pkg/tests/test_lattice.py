import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from apxgrp import fme
from apxgrp.errors import MembershipError
from apxgrp.lattice import LatticeBasis, hnf_with_transform

vec3 = st.lists(st.integers(-6, 6), min_size=3, max_size=3)


@given(st.lists(vec3, min_size=1, max_size=5))
def test_hnf_transform_identity(gens):
    H, U, piv = hnf_with_transform(gens)
    q = len(gens)
    for i in range(q):
        row = [sum(U[i][j] * gens[j][c] for j in range(q)) for c in range(3)]
        assert row == H[i]
    assert all(not any(H[i]) for i in range(len(piv), q))
    for i, col in enumerate(piv):
        assert H[i][col] > 0 and not any(H[i][:col])
        for above in range(i):
            assert 0 <= H[above][col] < H[i][col]


@given(st.lists(vec3, min_size=1, max_size=4), st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_membership_matches_combinations(gens, coeffs):
    basis = LatticeBasis.from_generators(gens, 3)
    v = [sum(c * g[j] for c, g in zip(coeffs, gens)) for j in range(3)]
    assert v in basis
    z = basis.particular_solution(v)
    assert list(basis.combine(z)) == v
    for rel in basis.kernel:
        assert not any(basis.combine(rel))


def test_non_members():
    basis = LatticeBasis.from_generators([(2, 0), (0, 3)], 2)
    assert (2, 3) in basis
    assert (1, 0) not in basis
    with pytest.raises(MembershipError):
        basis.particular_solution((0, 1))
    assert LatticeBasis.from_generators([(2,), (3,)], 1).basis == ((1,),)
    assert LatticeBasis.from_generators([(2,), (4,)], 1).basis == ((2,),)


def test_fme_half_open_square():
    # 0 <= t < 1, x = 2t  =>  0 <= x < 2
    eqs = [fme.eq([2, -1], 0)]
    ineqs = [fme.ineq([1, 0], 0), fme.ineq([-1, 0], 1, strict=True)]
    proj = fme.project(eqs, ineqs, [0], 2)
    assert proj.holds([0, 0]) and proj.holds([0, Fraction(3, 2)])
    assert not proj.holds([0, 2]) and not proj.holds([0, -1])


def test_fme_pairs_strictness():
    # x < y and y <= 3 on integers: (x, y) feasible iff x < 3
    ineqs = [fme.ineq([-1, 1, 0], 0, strict=True), fme.ineq([0, -1, 0], 3)]
    proj = fme.project([], ineqs, [1], 3)
    assert proj.holds([Fraction(5, 2), 0, 0]) and not proj.holds([3, 0, 0])
    assert not fme.feasible([], [fme.ineq([1], 0, strict=True), fme.ineq([-1], 0)], 1)
    assert fme.feasible([], [fme.ineq([1], 0), fme.ineq([-1], 0)], 1)


@given(st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4))
def test_fme_matches_brute_force(a, b, c, d):
    # P = {t1 g1 + t2 g2 : 0 <= t < 1} with g1=(a,b), g2=(c,d), nondegenerate only
    if a * d - b * c == 0:
        return
    eqs = [fme.eq([a, c, -1, 0], 0), fme.eq([b, d, 0, -1], 0)]
    ineqs = [fme.ineq([1, 0, 0, 0], 0), fme.ineq([0, 1, 0, 0], 0),
             fme.ineq([-1, 0, 0, 0], 1, strict=True), fme.ineq([0, -1, 0, 0], 1, strict=True)]
    proj = fme.project(eqs, ineqs, [0, 1], 4)
    det = a * d - b * c
    for x, y in itertools.product(range(-8, 9), repeat=2):
        t1 = Fraction(d * x - c * y, det)
        t2 = Fraction(-b * x + a * y, det)
        assert proj.holds([0, 0, x, y]) == (0 <= t1 < 1 and 0 <= t2 < 1)
