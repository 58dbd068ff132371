"""Explicit covers for iterated sumsets of finite sets in G0 x Z^n.

The pipeline, for ``A`` with ``k`` points and ``a0 = min A``:

1. ``A' = (k-1) * A``: with ``c = c(A)`` and ``h >= c k^2`` the set
   ``h * X_r + ck * A'_0 - c(k-1) sum(a_i - a0)`` (transported back by
   ``(r-1)h(k-1) a0``) covers ``rhA'`` by translates of ``hA'`` provided
   ``h * X_r`` lies in the group generated by ``A'``; that is guaranteed
   when ``(k-1) | h`` and can fail otherwise.
2. Keeping the elements divisible by ``k-1`` and dividing gives a cover
   ``Y`` of ``rhA`` by translates of ``hA``.  For the remaining ``h`` the
   floored-multiplier cover of :func:`rounded_simplex_cover` is used
   instead; it has the same size bound ``k b(r,k)``.
3. In ``G0 x Z^n`` the cover is ``G0 x Y`` with ``Y`` built for the free
   projection; for finite groups it is ``G0`` itself.

Builders prune translates that miss ``rhA`` entirely, except that the
product ``G0 x Y`` is kept whole.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError, SpecMismatchError, ThresholdError
from .group import GroupElement, GroupSpec, PointSet, singleton, whole_torsion_group
from .khovanskii import KhovanskiiData, khovanskii_c
from .simplex import binom_b, combo_set, dilated_cover, multiplier_tuples, cover_size_bound
from .sumset import Homomorphism, dilate, direct_product, hom_image, project, sumset, translate
from .verifier import useful_translates

METHODS = ("simplex", "main-zn", "abelian")


@dataclass(frozen=True)
class CoverPlan:
    A: PointSet
    r: int
    k: int
    c: int | None
    h_min: int
    method: str
    paper_bound: int

    def check(self, h: int):
        if h < self.h_min:
            raise ThresholdError(h, self.h_min)


def plan_cover(A: PointSet, r: int, method: str = "auto", data: KhovanskiiData | None = None) -> CoverPlan:
    """Threshold and size bound of the construction selected for ``A``."""
    A.require_nonempty()
    if r < 2:
        raise DomainError(f"r must be >= 2, got {r}")
    spec = A.spec
    if method == "auto":
        method = "main-zn" if spec.is_torsion_free and spec.rank else "abelian"
    if method == "abelian":
        n0 = spec.torsion_order
        if spec.rank == 0:
            return CoverPlan(A, r, len(A), None, 1, method, n0)
        inner = plan_cover(project(A), r, "main-zn", data)
        return CoverPlan(A, r, inner.k, inner.c, inner.h_min, method, n0 * inner.paper_bound)
    if not spec.is_torsion_free:
        raise DomainError(f"method {method!r} needs a torsion-free group; use 'abelian'")
    k = len(A)
    if method == "simplex":
        if k < 2:
            raise DomainError("the simplex cover needs |A| >= 2")
        return CoverPlan(A, r, k, None, 1, method, binom_b(r, k))
    if method != "main-zn":
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if k == 1:
        return CoverPlan(A, r, 1, None, 1, method, 1)
    c = (data or khovanskii_c(A)).c
    return CoverPlan(A, r, k, c, c * k * k, method, cover_size_bound(r, k))


def prune_cover(X: PointSet, A: PointSet, r: int, h: int) -> PointSet:
    """Drop translates x with ``(x + hA) ∩ rhA`` empty."""
    return useful_translates(A, r, h, X)


def build_cover_Aprime(A: PointSet, r: int, h: int, data: KhovanskiiData | None = None, prune: bool = True) -> PointSet:
    """Cover of ``rhA'`` by translates of ``hA'`` for ``A' = (k-1) * A``; at most ``k b(r,k)`` points."""
    spec = A.spec
    if not spec.is_torsion_free:
        raise DomainError("build_cover_Aprime works in Z^n")
    k = len(A)
    if k < 2:
        raise DomainError("need |A| >= 2")
    data = data or khovanskii_c(A)
    plan = plan_cover(A, r, "main-zn", data)
    plan.check(h)
    c = data.c
    a0 = A.min()
    A0 = translate(A, -a0)
    X_rh = combo_set(dilated_cover(A0, r, h))
    A0_prime = dilate(A0, k - 1)
    gen_sum = spec.element(np.sum(A0.rows, axis=0))
    X0 = translate(sumset(X_rh, dilate(A0_prime, c * k), method="sort"), gen_sum * (-c * (k - 1)))
    X = translate(X0, a0 * ((r - 1) * h * (k - 1)))
    if prune:
        X = prune_cover(X, dilate(A, k - 1), r, h)
    return X


def rounded_simplex_cover(A: PointSet, r: int, h: int) -> PointSet:
    """Cover of ``rhA`` by translates of ``hA`` from floored simplex multipliers.

    With ``a0 = min A`` and ``g_i = a_i - a0`` the elements are
    ``(r-1)h a0 + sum floor(h m_i/(k-1)) g_i + (k-2) g_j`` for every multiplier
    tuple ``m`` of X_r and every ``j`` in ``0..k-1`` (``g_0 = 0``), so at most
    ``k b(r,k)`` of them.  Valid for ``h >= (k-1)(k-2) - 1``: a point of ``rhA``
    with nonnegative integer counts ``n_i`` leaves integer remainders summing
    to at most ``h + k - 2`` after the floored multipliers, and some remainder
    is at least ``k - 2`` whenever the sum exceeds ``h``.
    """
    k = len(A.require_nonempty())
    if k == 1:
        return singleton(A.min() * ((r - 1) * h))
    if h < (k - 1) * (k - 2) - 1:
        raise ThresholdError(h, (k - 1) * (k - 2) - 1)
    q = k - 1
    a0 = A.min()
    G = (A.rows[1:] - A.rows[0]).astype(object)
    peel = np.vstack([np.zeros((1, A.spec.dim), dtype=object), (k - 2) * G])
    rows = []
    for m in multiplier_tuples(k, r):
        base = np.asarray([(h * mi) // q for mi in m], dtype=object) @ G
        rows.extend(base + peel)
    Y0 = PointSet.from_rows(A.spec, [[int(v) for v in row] for row in rows])
    return translate(Y0, a0 * ((r - 1) * h))


def build_cover_Zn(A: PointSet, r: int, h: int, data: KhovanskiiData | None = None, prune: bool = True, construction: str = "auto") -> PointSet:
    """Cover ``Y`` of ``rhA`` by translates of ``hA`` for ``A ⊂ Z^n``, ``|Y| <= k b(r,k)``.

    ``construction``:

    ``"dilated"``
        the ``A' = (k-1) * A`` route: build the cover for ``A'``, keep the
        elements divisible by ``k-1`` and divide.  Its rewrite step needs
        ``h * X_r`` inside the group generated by ``A'``, which holds when
        ``(k-1)`` divides ``h``; for other ``h`` the result can fail to cover.
    ``"rounded"``
        :func:`rounded_simplex_cover`, valid for every ``h >= h_min``.
    ``"auto"``
        ``dilated`` when ``(k-1) | h``, ``rounded`` otherwise.
    """
    spec = A.spec
    if not spec.is_torsion_free:
        raise DomainError("build_cover_Zn works in Z^n")
    k = len(A.require_nonempty())
    if r < 2 or h < 1:
        raise DomainError(f"need r >= 2 and h >= 1, got r={r}, h={h}")
    if k == 1:
        return singleton(A.min() * ((r - 1) * h))
    plan = plan_cover(A, r, "main-zn", data)
    plan.check(h)
    if construction == "auto":
        construction = "dilated" if h % (k - 1) == 0 else "rounded"
    if construction == "rounded":
        Y = rounded_simplex_cover(A, r, h)
    elif construction == "dilated":
        X = build_cover_Aprime(A, r, h, data, prune=False)
        q = k - 1
        keep = np.all(X.rows % q == 0, axis=1)
        Y = PointSet(spec, X.rows[keep] // q)
    else:
        raise ValueError(f"unknown construction {construction!r}")
    if prune:
        Y = prune_cover(Y, A, r, h)
    return Y


def build_cover_abelian(A: PointSet, r: int, h: int, prune: bool = True) -> PointSet:
    """``G0 x Y`` for ``A ⊂ G0 x Z^n`` (``G0`` itself when ``n = 0``).

    ``Y`` is the (pruned) cover of the free projection; the product itself
    is left unpruned.
    """
    spec = A.spec
    A.require_nonempty()
    if spec.rank == 0:
        return whole_torsion_group(spec)
    Y = build_cover_Zn(project(A), r, h, prune=prune)
    torsion = whole_torsion_group(GroupSpec(spec.moduli, 0))
    # no pruning of the product: |X| = n0 |Y| is part of the contract
    return direct_product(torsion, Y)


def build_cover(A: PointSet, r: int, h: int, method: str = "auto") -> tuple[PointSet, CoverPlan]:
    """Dispatch on ``method``; for ``simplex`` the cover is for ``(k-1) * A``."""
    plan = plan_cover(A, r, method)
    plan.check(h)
    if plan.method == "abelian":
        return build_cover_abelian(A, r, h), plan
    if plan.method == "main-zn":
        return build_cover_Zn(A, r, h), plan
    A0 = translate(A, -A.min())
    X = translate(combo_set(dilated_cover(A0, r, h)), A.min() * ((r - 1) * h * (plan.k - 1)))
    return X, plan


def transport_cover(X: PointSet, A: PointSet, c: GroupElement, r: int, h: int) -> PointSet:
    """Cover of ``c + A`` from a cover of ``A``: ``(r-1)hc + X``."""
    if X.spec != A.spec or c.spec != A.spec:
        raise SpecMismatchError("cover, set and translation must share a group")
    return translate(X, c * ((r - 1) * h))


def product_cover(X0: PointSet, A0: PointSet, X1: PointSet, A1: PointSet, params0: tuple[int, int] | None = None, params1: tuple[int, int] | None = None) -> PointSet:
    """``X0 x X1`` covers ``A0 x A1`` when both factors are covers at the same ``(r, h)``."""
    if params0 is not None and params1 is not None and tuple(params0) != tuple(params1):
        raise ParameterError(f"factor covers are for (r,h)={tuple(params0)} and {tuple(params1)}")
    if X0.spec != A0.spec or X1.spec != A1.spec:
        raise SpecMismatchError("each cover must live in its set's group")
    return direct_product(X0, X1)


def image_cover(X: PointSet, f: Homomorphism) -> PointSet:
    """``f(X)`` covers ``f(A)`` whenever X covers A."""
    return hom_image(X, f)


def size_bound(A: PointSet, r: int) -> int:
    """Size guaranteed by the construction ``auto`` would pick."""
    spec = A.spec
    if spec.rank == 0:
        return spec.torsion_order
    return spec.torsion_order * cover_size_bound(r, len(project(A)))
