"""Sumsets, iterated sumsets, dilations and homomorphic images of point sets.

Three interchangeable sumset paths are provided and must agree exactly:

``hash``
    Python set of coordinate tuples.  Slow; used as the reference.
``sort``
    numpy broadcasting followed by one lexicographic sort.
``dense``
    boolean occupancy grid over the bounding box (cyclic on torsion axes),
    built by OR-ing shifted copies.  This is the fast path for ``hA``.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DomainError,
    EmptySetError,
    GroupOverflowError,
    HomomorphismError,
    ResourceError,
    SpecMismatchError,
)
from .group import (
    INT64_MAX,
    GroupElement,
    GroupSpec,
    PointSet,
    _canonical_rows,
    as_rows,
    check_int64,
)

SIZE_CAP = int(os.environ.get("APXGRP_SUMSET_CAP", 10**7))
DENSE_CAP = int(os.environ.get("APXGRP_DENSE_CAP", 4 * 10**7))

METHODS = ("auto", "hash", "sort", "dense")


def _same_spec(S: PointSet, T: PointSet):
    if S.spec != T.spec:
        raise SpecMismatchError(f"{S.spec} vs {T.spec}")


def _free_bounds(rows: np.ndarray, spec: GroupSpec) -> tuple[list[int], list[int]]:
    free = rows[:, spec.ntorsion :]
    if len(free) == 0:
        return [0] * spec.rank, [0] * spec.rank
    return [int(v) for v in free.min(axis=0)], [int(v) for v in free.max(axis=0)]


def _check_sum_range(S: PointSet, T: PointSet):
    slo, shi = _free_bounds(S.rows, S.spec)
    tlo, thi = _free_bounds(T.rows, T.spec)
    for a, b in zip(slo, tlo):
        check_int64(a + b)
    for a, b in zip(shi, thi):
        check_int64(a + b)


def _check_scaled_range(S: PointSet, t: int):
    lo, hi = _free_bounds(S.rows, S.spec)
    for v in lo + hi:
        check_int64(v * t)


class DenseSet:
    """Occupancy grid of a point set.

    ``mask`` has one axis per torsion factor (length ``d``) followed by one
    axis per free coordinate covering ``[lo, lo + extent)``.
    """

    __slots__ = ("spec", "lo", "mask")

    def __init__(self, spec: GroupSpec, lo: Sequence[int], mask: np.ndarray):
        self.spec = spec
        self.lo = np.asarray(lo, dtype=np.int64).reshape(spec.rank)
        self.mask = mask

    @property
    def extent(self) -> tuple[int, ...]:
        return self.mask.shape[self.spec.ntorsion :]

    @property
    def hi(self) -> np.ndarray:
        return self.lo + np.asarray(self.extent, dtype=np.int64) - 1

    def __len__(self):
        return int(np.count_nonzero(self.mask))

    @classmethod
    def from_pointset(cls, S: PointSet, lo=None, extent=None) -> DenseSet:
        spec = S.spec
        if lo is None:
            slo, shi = _free_bounds(S.rows, spec)
            lo = np.asarray(slo, dtype=np.int64)
            extent = tuple(int(h - l + 1) for l, h in zip(slo, shi))
        lo = np.asarray(lo, dtype=np.int64).reshape(spec.rank)
        mask = np.zeros(tuple(spec.moduli) + tuple(extent), dtype=bool)
        if len(S):
            idx = S.rows.copy()
            idx[:, spec.ntorsion :] -= lo
            inside = np.all((idx[:, spec.ntorsion :] >= 0) & (idx[:, spec.ntorsion :] < np.asarray(extent, dtype=np.int64)), axis=1)
            idx = idx[inside]
            mask[tuple(idx.T)] = True
        return cls(spec, lo, mask)

    def to_pointset(self) -> PointSet:
        idx = as_rows(np.argwhere(self.mask), self.spec.dim).copy()
        idx[:, self.spec.ntorsion :] += self.lo
        return PointSet(self.spec, idx)

    def index_of(self, rows: np.ndarray) -> tuple[np.ndarray, tuple[np.ndarray, ...]]:
        """Grid indices of ``rows`` and a mask of which rows fall inside the box."""
        m = self.spec.ntorsion
        idx = as_rows(rows, self.spec.dim).copy()
        if m:
            idx[:, :m] %= np.asarray(self.spec.moduli, dtype=np.int64)
        idx[:, m:] -= self.lo
        inside = np.all((idx[:, m:] >= 0) & (idx[:, m:] < np.asarray(self.extent, dtype=np.int64)), axis=1)
        return inside, tuple(idx[inside].T)

    def contains_rows(self, rows: np.ndarray) -> np.ndarray:
        inside, idx = self.index_of(rows)
        out = np.zeros(len(inside), dtype=bool)
        out[inside] = self.mask[idx]
        return out

    def shifted_into(self, out: DenseSet, shift: Sequence[int], op=np.logical_or) -> None:
        """Combine ``self + shift`` into ``out.mask`` in place, clipped to ``out``'s box."""
        m = self.spec.ntorsion
        shift = [int(v) for v in shift]
        src = self.mask
        for axis, s in enumerate(shift[:m]):
            if s:
                src = np.roll(src, s, axis=axis)
        src_sl = [slice(None)] * m
        dst_sl = [slice(None)] * m
        for j in range(self.spec.rank):
            start = int(self.lo[j]) + shift[m + j] - int(out.lo[j])
            ext = self.extent[j]
            a, b = max(start, 0), min(start + ext, out.extent[j])
            if a >= b:
                return
            src_sl.append(slice(a - start, b - start))
            dst_sl.append(slice(a, b))
        if out.mask.ndim == 0:
            op(out.mask, src, out=out.mask)
            return
        view = out.mask[tuple(dst_sl)]
        op(view, src[tuple(src_sl)], out=view)


def _dense_volume(spec: GroupSpec, extent: Sequence[int]) -> int:
    vol = spec.torsion_order
    for e in extent:
        vol *= int(e)
    return vol


def _dense_sumset(S: DenseSet, T: PointSet) -> DenseSet:
    spec = S.spec
    tlo, thi = _free_bounds(T.rows, spec)
    lo = S.lo + np.asarray(tlo, dtype=np.int64)
    extent = tuple(int(e) + (b - a) for e, a, b in zip(S.extent, tlo, thi))
    if _dense_volume(spec, extent) > DENSE_CAP:
        raise ResourceError(f"dense grid of {_dense_volume(spec, extent)} cells exceeds cap {DENSE_CAP}")
    out = DenseSet(spec, lo, np.zeros(tuple(spec.moduli) + extent, dtype=bool))
    for row in T.rows:
        S.shifted_into(out, row)
    return out


def _sumset_hash(S: PointSet, T: PointSet) -> PointSet:
    spec = S.spec
    m = spec.ntorsion
    mods = spec.moduli
    acc = set()
    tt = T.tuples()
    for s in S.tuples():
        for t in tt:
            acc.add(
                tuple((a + b) % d for a, b, d in zip(s[:m], t[:m], mods)) + tuple(a + b for a, b in zip(s[m:], t[m:]))
            )
    rows = sorted(acc)
    return PointSet(spec, as_rows(rows, spec.dim))


def _sumset_sort(S: PointSet, T: PointSet) -> PointSet:
    spec = S.spec
    total = as_rows(S.rows[:, None, :] + T.rows[None, :, :], spec.dim) if spec.dim else np.zeros((1, 0), np.int64)
    return PointSet(spec, _canonical_rows(total, spec))


def sumset(S: PointSet, T: PointSet, method: str = "auto", cap: int | None = None) -> PointSet:
    """``{s + t : s in S, t in T}``."""
    _same_spec(S, T)
    if not len(S) or not len(T):
        raise EmptySetError("sumset operands must be nonempty")
    cap = SIZE_CAP if cap is None else cap
    if len(S) * len(T) > cap:
        raise ResourceError(f"|S|*|T| = {len(S) * len(T)} exceeds the sumset cap {cap}")
    _check_sum_range(S, T)
    if method == "auto":
        method = _pick_method(S, T)
    if method == "hash":
        return _sumset_hash(S, T)
    if method == "sort":
        return _sumset_sort(S, T)
    if method == "dense":
        if len(S) < len(T):
            S, T = T, S
        return _dense_sumset(DenseSet.from_pointset(S), T).to_pointset()
    raise ValueError(f"unknown sumset method {method!r}; expected one of {METHODS}")


def _pick_method(S: PointSet, T: PointSet) -> str:
    slo, shi = _free_bounds(S.rows, S.spec)
    tlo, thi = _free_bounds(T.rows, T.spec)
    extent = [(b - a) + (d - c) + 1 for a, b, c, d in zip(slo, shi, tlo, thi)]
    vol = _dense_volume(S.spec, extent)
    if vol <= DENSE_CAP and vol <= 8 * len(S) * len(T):
        return "dense"
    return "sort"


class PowerCache:
    """Thread-safe memo of ``[A, 2A, ..., hA]`` keyed by the canonical set."""

    def __init__(self, max_sets: int = 32):
        self._lock = threading.Lock()
        self._data: dict = {}
        self.max_sets = max_sets

    def clear(self):
        with self._lock:
            self._data.clear()

    def __len__(self):
        return len(self._data)

    def powers(self, A: PointSet, h: int) -> list[DenseSet | PointSet]:
        key = (A.spec, A.rows.tobytes())
        with self._lock:
            chain = self._data.setdefault(key, [])
            if len(self._data) > self.max_sets:
                # evict oldest entries other than the one in use
                for k in list(self._data)[: len(self._data) - self.max_sets]:
                    if k != key:
                        del self._data[k]
            while len(chain) < h:
                chain.append(_next_power(A, chain[-1] if chain else None))
            return chain[:h]


POWER_CACHE = PowerCache()


def _next_power(A: PointSet, prev):
    if prev is None:
        slo, shi = _free_bounds(A.rows, A.spec)
        vol = _dense_volume(A.spec, [b - a + 1 for a, b in zip(slo, shi)])
        return DenseSet.from_pointset(A) if vol <= DENSE_CAP else A
    if isinstance(prev, DenseSet):
        try:
            return _dense_sumset(prev, A)
        except ResourceError:
            prev = prev.to_pointset()
    return sumset(prev, A, method="sort")


def dense_h_fold(A: PointSet, h: int, cache: bool = False) -> DenseSet | PointSet:
    """``hA`` as a :class:`DenseSet` when it fits the dense cap, else a :class:`PointSet`."""
    _check_h(A, h)
    if cache:
        return POWER_CACHE.powers(A, h)[-1]
    cur = None
    for _ in range(h):
        cur = _next_power(A, cur)
    return cur


def _check_h(A: PointSet, h: int):
    if h < 1:
        raise DomainError(f"h must be a positive integer, got {h}")
    if not len(A):
        raise EmptySetError("h_fold needs a nonempty set")
    _check_scaled_range(A, h)


def as_pointset(S: DenseSet | PointSet) -> PointSet:
    return S.to_pointset() if isinstance(S, DenseSet) else S


def h_fold(A: PointSet, h: int, method: str = "auto", cache: bool = False) -> PointSet:
    """The h-fold sumset ``A + ... + A``, built incrementally as ``(h-1)A + A``."""
    _check_h(A, h)
    if method == "auto":
        return as_pointset(dense_h_fold(A, h, cache=cache))
    cur = A
    for _ in range(h - 1):
        cur = sumset(cur, A, method=method)
    return cur


def h_fold_scan(A: PointSet, h_max: int) -> list[PointSet]:
    """``[A, 2A, ..., h_max A]`` through the shared power cache."""
    _check_h(A, h_max)
    return [as_pointset(p) for p in POWER_CACHE.powers(A, h_max)]


def dilate(A: PointSet, t: int) -> PointSet:
    """``t * A = {t a : a in A}``."""
    _check_scaled_range(A, int(t))
    return PointSet(A.spec, _canonical_rows(A.rows * int(t), A.spec))


def translate(A: PointSet, c: GroupElement) -> PointSet:
    if c.spec != A.spec:
        raise SpecMismatchError(f"{c.spec} vs {A.spec}")
    lo, hi = _free_bounds(A.rows, A.spec)
    for a, b, z in zip(lo, hi, c.free):
        check_int64(a + z)
        check_int64(b + z)
    return PointSet(A.spec, _canonical_rows(A.rows + np.asarray(c.coords, dtype=np.int64), A.spec))


def direct_product(S0: PointSet, S1: PointSet, cap: int | None = None) -> PointSet:
    """``S0 x S1`` inside ``spec0 x spec1`` (torsion factors first)."""
    cap = SIZE_CAP if cap is None else cap
    if len(S0) * len(S1) > cap:
        raise ResourceError(f"product of {len(S0)} x {len(S1)} points exceeds cap {cap}")
    spec = S0.spec.product(S1.spec)
    m0, m1 = S0.spec.ntorsion, S1.spec.ntorsion
    a = np.repeat(S0.rows, len(S1), axis=0)
    b = np.tile(S1.rows, (len(S0), 1))
    rows = np.concatenate([a[:, :m0], b[:, :m1], a[:, m0:], b[:, m1:]], axis=1)
    return PointSet(spec, _canonical_rows(rows, spec))


def project(S: PointSet) -> PointSet:
    """Image under the projection ``G0 x Z^n -> Z^n``."""
    if S.spec.rank == 0:
        raise DomainError("projection onto the free part needs rank >= 1")
    spec = GroupSpec((), S.spec.rank)
    return PointSet(spec, _canonical_rows(S.free_rows, spec))


@dataclass(frozen=True)
class Homomorphism:
    """A homomorphism given by the images of the standard generators.

    ``images[i]`` is the flat coordinate row in ``target`` of the i-th
    generator of ``source`` (torsion generators first, then free ones).
    """

    source: GroupSpec
    target: GroupSpec
    images: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        images = tuple(tuple(int(v) for v in img) for img in self.images)
        object.__setattr__(self, "images", images)
        if len(images) != self.source.dim:
            raise HomomorphismError(f"need {self.source.dim} generator images, got {len(images)}")
        for img in images:
            if len(img) != self.target.dim:
                raise HomomorphismError(f"image {img} is not an element of {self.target}")
        for d, img in zip(self.source.moduli, images):
            if not self.target.element([d * v for v in img]).is_identity():
                raise HomomorphismError(f"generator of order {d} is sent to {img}, whose order does not divide {d}")

    @classmethod
    def identity(cls, spec: GroupSpec) -> Homomorphism:
        return cls(spec, spec, tuple(tuple(int(i == j) for j in range(spec.dim)) for i in range(spec.dim)))

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.images, dtype=np.int64).reshape(self.source.dim, self.target.dim)

    def apply_rows(self, rows: np.ndarray) -> np.ndarray:
        rows = as_rows(rows, self.source.dim)
        if len(rows):
            bound = int(np.abs(rows).max()) * int(np.abs(self.matrix).sum(axis=0).max(initial=0))
            if bound > INT64_MAX:
                raise GroupOverflowError("homomorphic image leaves the 64-bit range")
        return rows @ self.matrix

    def __call__(self, g: GroupElement) -> GroupElement:
        if g.spec != self.source:
            raise SpecMismatchError(f"{g.spec} vs {self.source}")
        return self.target.element(self.apply_rows(np.asarray([g.coords]))[0])


def hom_image(S: PointSet, f: Homomorphism) -> PointSet:
    if S.spec != f.source:
        raise SpecMismatchError(f"{S.spec} vs {f.source}")
    return PointSet(f.target, _canonical_rows(f.apply_rows(S.rows), f.target))


__all__ = [
    "DenseSet",
    "Homomorphism",
    "POWER_CACHE",
    "PowerCache",
    "as_pointset",
    "dense_h_fold",
    "dilate",
    "direct_product",
    "h_fold",
    "h_fold_scan",
    "hom_image",
    "project",
    "sumset",
    "translate",
]
