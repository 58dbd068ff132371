"""Simplex covers in coefficient space.

Points of ``rK`` (``K`` the convex hull of ``A = {a0, ..., a_{k-1}}``) are
handled through their coefficients over ``a_i - a0``; the polytopes are
never built.  All arithmetic is exact (:class:`fractions.Fraction`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple, Sequence

from .errors import DomainError
from .group import GroupElement, PointSet, canonicalize
from .sumset import dilate


def binom_b(r: int, k: int) -> int:
    """``C((r+1)(k-1)-1, k-1)``, the number of multiplier tuples of X_r."""
    if r < 2 or k < 2:
        raise DomainError(f"b(r,k) needs r >= 2 and k >= 2, got r={r}, k={k}")
    return math.comb((r + 1) * (k - 1) - 1, k - 1)


def cover_size_bound(r: int, k: int) -> int:
    """``k * b(r,k)`` for k >= 2, and 1 for a singleton."""
    return 1 if k == 1 else k * binom_b(r, k)


@dataclass(frozen=True)
class CoeffVector:
    """Nonnegative rational coefficients over ``a1 - a0, ..., a_{k-1} - a0``."""

    entries: tuple[Fraction, ...]
    budget: Fraction

    def __post_init__(self):
        entries = tuple(Fraction(e) for e in self.entries)
        budget = Fraction(self.budget)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "budget", budget)
        if any(e < 0 for e in entries):
            raise DomainError(f"negative coefficient in {entries}")
        if sum(entries, Fraction(0)) > budget:
            raise DomainError(f"coefficients sum to {sum(entries)} > budget {budget}")

    @property
    def k(self) -> int:
        return len(self.entries) + 1

    @property
    def total(self) -> Fraction:
        return sum(self.entries, Fraction(0))

    def __iter__(self):
        return iter(self.entries)


@dataclass(frozen=True)
class ComboPoint:
    """An element of X_r together with the multipliers that produce it."""

    multipliers: tuple[int, ...]
    embedded: GroupElement


def multiplier_tuples(k: int, r: int) -> Iterator[tuple[int, ...]]:
    """All ``m`` in N_0^{k-1} with ``sum(m) <= r(k-1) - 1``, lexicographically."""
    limit = r * (k - 1) - 1

    def rec(prefix: tuple[int, ...], left: int, slots: int):
        if slots == 0:
            yield prefix
            return
        for v in range(left + 1):
            yield from rec(prefix + (v,), left - v, slots - 1)

    yield from rec((), limit, k - 1)


def base_and_differences(A: PointSet) -> tuple[GroupElement, list[GroupElement]]:
    """Base point ``a0 = min A`` and the differences ``a_i - a0`` in canonical order."""
    pts = list(A.require_nonempty())
    a0 = pts[0]
    return a0, [a - a0 for a in pts[1:]]


def _combo(diffs: Sequence[GroupElement], m: Sequence[int], start: GroupElement) -> GroupElement:
    g = start
    for mi, d in zip(m, diffs):
        if mi:
            g = g + d * mi
    return g


def build_Xr(A: PointSet, r: int) -> list[ComboPoint]:
    """The cover X_r with ``|X_r| = b(r,k)`` combination records.

    ``embedded = (k-1)(r-1) a0 + sum m_i (a_i - a0)``.  With torsion two
    records may embed to the same element.
    """
    k = len(A)
    if k < 2:
        raise DomainError("X_r needs |A| >= 2; singletons are handled by the lattice cover")
    binom_b(r, k)
    a0, diffs = base_and_differences(A)
    shift = a0 * ((k - 1) * (r - 1))
    return [ComboPoint(m, _combo(diffs, m, shift)) for m in multiplier_tuples(k, r)]


def dilated_cover(A: PointSet, r: int, h: int) -> list[ComboPoint]:
    """X_{r,h} = h * X_r, the cover built over the dilated set ``h * A``."""
    if h < 1:
        raise DomainError(f"h must be positive, got {h}")
    return [ComboPoint(p.multipliers, p.embedded * h) for p in build_Xr(A, r)]


def combo_set(points: Sequence[ComboPoint]) -> PointSet:
    return canonicalize([p.embedded for p in points], points[0].embedded.spec)


class Decomposition(NamedTuple):
    """``mu = multipliers/(k-1) + remainder (+ e_j/(k-1) when unit_index is j)``.

    ``unit_index`` uses the 1-based labels of ``a_1, ..., a_{k-1}``.
    """

    multipliers: tuple[int, ...]
    remainder: CoeffVector
    unit_index: int | None

    def reconstruct(self) -> tuple[Fraction, ...]:
        q = len(self.multipliers)
        out = [Fraction(m, q) + lam for m, lam in zip(self.multipliers, self.remainder.entries)]
        if self.unit_index is not None:
            out[self.unit_index - 1] += Fraction(1, q)
        return tuple(out)


def decompose(mu: CoeffVector, r: int) -> Decomposition:
    """Split a point of rK into a member of ``X_r/(k-1)`` plus a point of K."""
    k = mu.k
    if k < 2:
        raise DomainError("need k >= 2")
    if mu.total > r:
        raise DomainError(f"coefficients sum to {mu.total} > r = {r}")
    q = k - 1
    m = [math.floor(e * q) for e in mu.entries]
    lam = [e - Fraction(mi, q) for e, mi in zip(mu.entries, m)]
    if any(lam) or not any(m):
        return Decomposition(tuple(m), CoeffVector(tuple(lam), Fraction(1)), None)
    # exact multiple of 1/(k-1): move one unit of some m_j into K
    j = next(i for i, mi in enumerate(m) if mi >= 1)
    m[j] -= 1
    return Decomposition(tuple(m), CoeffVector((Fraction(0),) * q, Fraction(1)), j + 1)


def reduce_hK(mu: Sequence[Fraction], c: int) -> tuple[int, tuple[Fraction, ...]]:
    """Peel ``c * a_j`` off a point of hK given by coefficients over all k points.

    Returns the smallest ``j`` with ``mu_j >= c`` and ``mu`` with that entry
    lowered by ``c``; needs ``sum(mu) = h >= c k``.
    """
    mu = tuple(Fraction(v) for v in mu)
    k = len(mu)
    h = sum(mu, Fraction(0))
    if c < 1:
        raise DomainError(f"c must be a positive integer, got {c}")
    if any(v < 0 for v in mu):
        raise DomainError(f"negative coefficient in {mu}")
    if h < c * k:
        raise DomainError(f"need h >= c k = {c * k}, got h = {h}")
    j = next(i for i, v in enumerate(mu) if v >= c)
    return j, mu[:j] + (mu[j] - c,) + mu[j + 1 :]


def polytope_cover_set(A: PointSet, r: int, h: int = 1) -> tuple[PointSet, PointSet]:
    """``(A', X)`` with ``A' = (k-1) * A`` and ``X = X_{r,h}``.

    ``rh conv(A') ⊆ X + h conv(A')`` holds for the polytopes; on lattice
    points it may or may not, which the verifier decides.
    """
    k = len(A)
    return dilate(A, k - 1), combo_set(dilated_cover(A, r, h))
