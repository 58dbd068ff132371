"""The lattice-point rewrite constant c(A) for finite A in Z^n.

With ``a0 = min A`` and generators ``g_i = a_i - a0``:

* ``P`` is the half-open parallelepiped ``{sum t_i g_i : 0 <= t_i < 1}``;
* each lattice point ``p`` of the group generated by the ``g_i`` inside
  ``P`` gets an integer representation ``p = sum z_i g_i`` of least l1 norm
  (ties broken lexicographically);
* ``m`` is the largest such l1 norm and ``c = k - 1 + m``.

For ``h >= ck`` every lattice point of ``c * sum(g_i) + (h - ck) conv(A - a0)``
is then a genuine element of ``h(A - a0)``; :func:`verify_rewrite` checks
that inclusion exhaustively.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import fme
from .errors import DomainError, ResourceError
from .group import GroupElement, PointSet
from .lattice import LatticeBasis
from .sumset import DenseSet, dense_h_fold, translate

ELIMINATION_CAP = int(os.environ.get("APXGRP_ELIMINATION_CAP", 6))
BOX_CAP = 2 * 10**6
SEARCH_CAP = 5 * 10**6

POLICY = "min-l1 representation, lexicographically smallest z among minimisers"


def _generators(A: PointSet) -> tuple[GroupElement, list[tuple[int, ...]]]:
    if not A.spec.is_torsion_free:
        raise DomainError("the rewrite constant is defined for subsets of Z^n only")
    if len(A) < 2:
        raise DomainError("need |A| >= 2")
    a0 = A.min()
    gens = [tuple(int(v) for v in row - np.asarray(a0.coords)) for row in A.rows[1:]]
    return a0, gens


def lattice_basis(A: PointSet) -> LatticeBasis:
    """HNF basis of the group generated by ``A - a0``."""
    _, gens = _generators(A)
    return LatticeBasis.from_generators(gens, A.spec.rank)


def _box_points(lo: Sequence[int], hi: Sequence[int]) -> np.ndarray:
    sizes = [h - l + 1 for l, h in zip(lo, hi)]
    vol = int(np.prod(sizes, dtype=object)) if sizes else 1
    if vol > BOX_CAP:
        raise ResourceError(f"candidate box of {vol} lattice points exceeds cap {BOX_CAP}")
    axes = [np.arange(l, h + 1, dtype=np.int64) for l, h in zip(lo, hi)]
    if not axes:
        return np.zeros((1, 0), dtype=np.int64)
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))


def _lattice_candidates(basis: LatticeBasis, lo, hi) -> np.ndarray:
    pts = _box_points(lo, hi)
    keep = [tuple(int(v) for v in p) in basis for p in pts]
    return pts[np.asarray(keep, dtype=bool)] if len(pts) else pts


def parallelepiped_system(gens: Sequence[Sequence[int]], n: int) -> fme.Projection:
    """Constraints on ``p`` equivalent to ``p in P``, with ``t`` eliminated.

    Variables are ``t_1..t_q`` followed by ``p_1..p_n``.
    """
    q = len(gens)
    nv = q + n
    eqs = []
    for j in range(n):
        coeffs = [0] * nv
        for i, g in enumerate(gens):
            coeffs[i] = g[j]
        coeffs[q + j] = -1
        eqs.append(fme.eq(coeffs, 0))
    ineqs = []
    for i in range(q):
        lo = [0] * nv
        lo[i] = 1
        ineqs.append(fme.ineq(lo, 0))
        hi = [0] * nv
        hi[i] = -1
        ineqs.append(fme.ineq(hi, 1, strict=True))
    return fme.project(eqs, ineqs, range(q), nv)


def region_system(gens: Sequence[Sequence[int]], n: int, c: int, h: int) -> fme.Projection:
    """Constraints on ``q`` equivalent to ``q = sum x_i g_i`` with ``x_i >= c``, ``sum x_i <= h - c``."""
    q = len(gens)
    nv = q + n
    eqs = []
    for j in range(n):
        coeffs = [0] * nv
        for i, g in enumerate(gens):
            coeffs[i] = g[j]
        coeffs[q + j] = -1
        eqs.append(fme.eq(coeffs, 0))
    ineqs = []
    for i in range(q):
        row = [0] * nv
        row[i] = 1
        ineqs.append(fme.ineq(row, -c))
    ineqs.append(fme.ineq([-1] * q + [0] * n, h - c))
    return fme.project(eqs, ineqs, range(q), nv)


def _parallelepiped_box(gens, n):
    lo = [sum(min(0, g[j]) for g in gens) for j in range(n)]
    hi = [sum(max(0, g[j]) for g in gens) for j in range(n)]
    return lo, hi


def _solve_independent(gens, p) -> list[Fraction] | None:
    """Unique rational ``t`` with ``sum t_i g_i = p`` for independent ``g``; ``None`` if off the span."""
    q = len(gens)
    n = len(p)
    # augmented n x (q+1) system, exact Gauss-Jordan
    M = [[Fraction(gens[i][j]) for i in range(q)] + [Fraction(p[j])] for j in range(n)]
    row = 0
    where = [-1] * q
    for col in range(q):
        piv = next((r for r in range(row, n) if M[r][col]), None)
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        inv = 1 / M[row][col]
        M[row] = [v * inv for v in M[row]]
        for r in range(n):
            if r != row and M[r][col]:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[row])]
        where[col] = row
        row += 1
    if any(M[r][q] for r in range(row, n)):
        return None
    return [M[where[i]][q] if where[i] >= 0 else Fraction(0) for i in range(q)]


def enumerate_P(A: PointSet, method: str = "auto") -> list[GroupElement]:
    """Lattice points of the group generated by ``A - a0`` inside the half-open parallelepiped.

    ``method`` is ``"fast"`` (independent generators only: solve for ``t``
    exactly), ``"fm"`` (Fourier-Motzkin projection) or ``"auto"``.
    """
    _, gens = _generators(A)
    q, n = len(gens), A.spec.rank
    if q > ELIMINATION_CAP:
        raise ResourceError(f"{q} generators exceed the elimination cap {ELIMINATION_CAP}")
    basis = LatticeBasis.from_generators(gens, n)
    independent = basis.rank == q
    if method == "auto":
        method = "fast" if independent else "fm"
    lo, hi = _parallelepiped_box(gens, n)
    cands = _lattice_candidates(basis, lo, hi)
    if method == "fast":
        if not independent:
            raise DomainError("the direct solve needs linearly independent generators")
        keep = []
        for p in cands:
            t = _solve_independent(gens, [int(v) for v in p])
            keep.append(t is not None and all(0 <= ti < 1 for ti in t))
        pts = cands[np.asarray(keep, dtype=bool)] if len(cands) else cands
    elif method == "fm":
        proj = parallelepiped_system(gens, n)
        pts = cands[proj.holds_rows(cands, range(q, q + n))]
    else:
        raise ValueError(f"unknown method {method!r}")
    spec = A.spec
    return [spec.element(p) for p in pts]


def _l1_sphere(q: int, radius: int):
    """Integer vectors of length q with l1 norm ``radius``, lexicographically."""
    if q == 0:
        if radius == 0:
            yield ()
        return
    if q == 1:
        if radius == 0:
            yield (0,)
        else:
            yield (-radius,)
            yield (radius,)
        return
    for first in range(-radius, radius + 1):
        for rest in _l1_sphere(q - 1, radius - abs(first)):
            yield (first,) + rest


def minimal_representation(p: GroupElement | Sequence[int], A: PointSet, basis: LatticeBasis | None = None) -> tuple[tuple[int, ...], int]:
    """Integers ``z`` with ``p = sum z_i (a_i - a0)`` minimising ``sum |z_i|``.

    Starts from an HNF particular solution (whose norm bounds the search)
    and scans l1 spheres of growing radius; the first sphere with a hit
    gives the minimum and the lexicographically smallest hit is returned.
    """
    _, gens = _generators(A)
    basis = basis or LatticeBasis.from_generators(gens, A.spec.rank)
    target = tuple(int(v) for v in (p.coords if isinstance(p, GroupElement) else p))
    z0 = basis.particular_solution(target)
    bound = sum(abs(v) for v in z0)
    if not basis.kernel:
        return tuple(z0), bound
    q = len(gens)
    G = np.asarray(gens, dtype=np.int64).reshape(q, -1)
    tgt = np.asarray(target, dtype=np.int64)
    scanned = 0
    for radius in range(bound + 1):
        for z in _l1_sphere(q, radius):
            scanned += 1
            if scanned > SEARCH_CAP:
                raise ResourceError("minimal representation search exceeded its cap")
            if np.array_equal(np.asarray(z, dtype=np.int64) @ G, tgt):
                return z, radius
    return tuple(z0), bound


@dataclass(frozen=True)
class ParallelepipedPoint:
    point: GroupElement
    z: tuple[int, ...]
    l1: int


@dataclass(frozen=True)
class KhovanskiiData:
    base: GroupElement
    generators: tuple[tuple[int, ...], ...]
    points: tuple[ParallelepipedPoint, ...]
    m: int
    c: int
    policy: str = POLICY

    @property
    def k(self) -> int:
        return len(self.generators) + 1

    def to_json(self) -> dict:
        return {
            "base": list(self.base.coords),
            "generators": [list(g) for g in self.generators],
            "points": [
                {"p": list(pp.point.coords), "z": list(pp.z), "l1": pp.l1} for pp in self.points
            ],
            "k": self.k,
            "m": self.m,
            "c": self.c,
            "policy": self.policy,
        }


def khovanskii_c(A: PointSet) -> KhovanskiiData:
    """``c(A) = k - 1 + m`` from minimal representations over ``P``."""
    a0, gens = _generators(A)
    basis = LatticeBasis.from_generators(gens, A.spec.rank)
    pts = []
    for p in enumerate_P(A):
        z, l1 = minimal_representation(p, A, basis)
        pts.append(ParallelepipedPoint(p, z, l1))
    m = max(pp.l1 for pp in pts)
    return KhovanskiiData(a0, tuple(gens), tuple(pts), m, len(A) - 1 + m)


def rewrite_region_points(A: PointSet, c: int, h: int) -> np.ndarray:
    """Lattice points of ``c * sum(g_i) + (h - ck) conv(A - a0)`` as integer rows."""
    _, gens = _generators(A)
    k, n = len(A), A.spec.rank
    if h < c * k:
        raise DomainError(f"need h >= ck = {c * k}, got h = {h}")
    basis = LatticeBasis.from_generators(gens, n)
    corner = [c * sum(g[j] for g in gens) for j in range(n)]
    verts = [corner] + [[corner[j] + (h - c * k) * g[j] for j in range(n)] for g in gens]
    lo = [min(v[j] for v in verts) for j in range(n)]
    hi = [max(v[j] for v in verts) for j in range(n)]
    cands = _lattice_candidates(basis, lo, hi)
    q = len(gens)
    proj = region_system(gens, n, c, h)
    return cands[proj.holds_rows(cands, range(q, q + n))]


def rewrite_failures(A: PointSet, data: KhovanskiiData | int, h: int) -> np.ndarray:
    """Region lattice points that are missing from ``h(A - a0)``."""
    c = data.c if isinstance(data, KhovanskiiData) else int(data)
    region = rewrite_region_points(A, c, h)
    A0 = translate(A, -A.min())
    hA = dense_h_fold(A0, h)
    if isinstance(hA, DenseSet):
        inside = hA.contains_rows(region)
    else:
        members = set(hA.tuples())
        inside = np.asarray([tuple(int(v) for v in p) in members for p in region], dtype=bool)
    return region[~inside]


def verify_rewrite(A: PointSet, data: KhovanskiiData | int, h: int) -> bool:
    """Whether every region lattice point is an element of ``h(A - a0)``."""
    return len(rewrite_failures(A, data, h)) == 0
