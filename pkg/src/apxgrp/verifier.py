"""Exact oracles for covers: containment, counting bounds, greedy and minimal covers.

Everything here decides ``rhA ⊆ X + hA`` by enumeration; nothing is
inferred from the constructions in :mod:`apxgrp.cover`.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.fft

from .errors import DomainError, EmptySetError, ResourceError, SpecMismatchError
from .group import GroupElement, GroupSpec, PointSet, as_rows
from .sumset import DenseSet, _next_power, as_pointset

MAX_UNIVERSE = int(os.environ.get("APXGRP_MAX_UNIVERSE", 10**6))
# candidates x universe bits materialised by the exact search
MINIMAL_WORK_CAP = int(os.environ.get("APXGRP_MINIMAL_WORK", 4 * 10**8))
DEFAULT_BUDGET = 200_000


def _check_args(A: PointSet, r: int, h: int):
    if not len(A):
        raise EmptySetError("A must be nonempty")
    if r < 2:
        raise DomainError(f"r must be >= 2, got {r}")
    if h < 1:
        raise DomainError(f"h must be >= 1, got {h}")


def sumset_pair(A: PointSet, h: int, rh: int) -> tuple[DenseSet | PointSet, DenseSet | PointSet]:
    """``(hA, rhA)`` from one incremental pass."""
    cur = None
    low = None
    for i in range(1, rh + 1):
        cur = _next_power(A, cur)
        if i == h:
            low = cur
    return low, cur


def _dense(S: DenseSet | PointSet) -> DenseSet:
    return S if isinstance(S, DenseSet) else DenseSet.from_pointset(S)


class CoverCheck(NamedTuple):
    ok: bool
    witness: GroupElement | None

    def __bool__(self):
        return self.ok


# --- three independent containment checks -------------------------------


def _uncovered_dense(U: DenseSet, H: DenseSet, X: PointSet) -> np.ndarray:
    cov = DenseSet(U.spec, U.lo, np.zeros_like(U.mask))
    for x in X.rows:
        H.shifted_into(cov, x)
    return U.mask & ~cov.mask


def _first_dense(U: DenseSet, missing: np.ndarray) -> GroupElement | None:
    idx = np.argwhere(missing)
    if not len(idx):
        return None
    row = idx[0].astype(np.int64)
    row[U.spec.ntorsion :] += U.lo
    return U.spec.element(row)


def _encode(rows: np.ndarray, spec: GroupSpec, lo: np.ndarray, ext: np.ndarray):
    """Mixed-radix keys preserving lexicographic order inside a box; -1 outside."""
    m = spec.ntorsion
    rows = as_rows(rows, spec.dim).copy()
    if m:
        rows[:, :m] %= np.asarray(spec.moduli, dtype=np.int64)
    rows[:, m:] -= lo
    radix = np.concatenate([np.asarray(spec.moduli, dtype=np.int64), ext]) if spec.dim else np.zeros(0, np.int64)
    inside = np.all((rows >= 0) & (rows < radix), axis=1)
    keys = np.zeros(len(rows), dtype=np.int64)
    for j in range(spec.dim):
        keys = keys * radix[j] + rows[:, j]
    keys[~inside] = -1
    return keys


def _uncovered_sorted(U: PointSet, H: PointSet, X: PointSet) -> np.ndarray:
    spec = U.spec
    m = spec.ntorsion
    free = H.free_rows
    lo = free.min(axis=0) if len(free) and spec.rank else np.zeros(spec.rank, np.int64)
    ext = (free.max(axis=0) - lo + 1) if len(free) and spec.rank else np.zeros(spec.rank, np.int64)
    radix = [*spec.moduli, *[int(e) for e in ext]]
    if math.prod(radix) >= 2**62:
        raise ResourceError("key space of hA does not fit in 64 bits")
    hkeys = _encode(H.rows, spec, lo, ext)  # already sorted: H is canonical
    pending = np.arange(len(U))
    for x in X.rows:
        if not len(pending):
            break
        diff = U.rows[pending] - x
        keys = _encode(diff, spec, lo, ext)
        pos = np.searchsorted(hkeys, keys)
        pos = np.minimum(pos, len(hkeys) - 1)
        hit = (keys >= 0) & (hkeys[pos] == keys)
        pending = pending[~hit]
    return pending


def _uncovered_hash(U: PointSet, H: PointSet, X: PointSet) -> list[tuple[int, ...]]:
    spec = U.spec
    m = spec.ntorsion
    mods = spec.moduli
    members = set(H.tuples())
    xs = X.tuples()
    missing = []
    for q in U.tuples():
        for x in xs:
            d = tuple((a - b) % n for a, b, n in zip(q[:m], x[:m], mods)) + tuple(a - b for a, b in zip(q[m:], x[m:]))
            if d in members:
                break
        else:
            missing.append(q)
    return missing


def verify_cover(A: PointSet, r: int, h: int, X: PointSet, method: str = "auto") -> CoverCheck:
    """Decide ``rhA ⊆ X + hA`` exactly; the witness is the least uncovered point.

    ``method`` selects the membership test: ``"dense"`` (occupancy grids),
    ``"sorted"`` (binary search in sorted keys) or ``"hash"`` (Python sets).
    """
    _check_args(A, r, h)
    if X.spec != A.spec:
        raise SpecMismatchError(f"{X.spec} vs {A.spec}")
    hA, rhA = sumset_pair(A, h, r * h)
    if not len(X):
        return CoverCheck(False, as_pointset(rhA)[0])
    if method == "auto":
        method = "dense" if isinstance(rhA, DenseSet) and isinstance(hA, DenseSet) else "sorted"
    if method == "dense":
        U = _dense(rhA)
        missing = _uncovered_dense(U, _dense(hA), X)
        w = _first_dense(U, missing)
        return CoverCheck(w is None, w)
    U, H = as_pointset(rhA), as_pointset(hA)
    if method == "sorted":
        pending = _uncovered_sorted(U, H, X)
        return CoverCheck(not len(pending), U[int(pending[0])] if len(pending) else None)
    if method == "hash":
        missing = _uncovered_hash(U, H, X)
        return CoverCheck(not missing, A.spec.element(missing[0]) if missing else None)
    raise ValueError(f"unknown verification method {method!r}")


def lower_bound(A: PointSet, r: int, h: int) -> int:
    """``ceil(|rhA| / |hA|)``: no cover can be smaller."""
    _check_args(A, r, h)
    hA, rhA = sumset_pair(A, h, r * h)
    return -(-len(rhA) // len(hA))


# --- coverage counts ------------------------------------------------------


class _Correlator:
    """``counts[x] = |(x + H) ∩ mask|`` for every x, by FFT.

    Free axes are zero padded (linear correlation); torsion axes keep length
    ``d`` so the correlation is cyclic there.  ``x`` runs over the box
    ``[U.lo - H.hi, U.hi - H.lo]``.
    """

    def __init__(self, U: DenseSet, H: DenseSet):
        spec = U.spec
        self.spec = spec
        self.m = spec.ntorsion
        self.U_extent = U.extent
        self.x_lo = U.lo - H.hi
        self.x_extent = tuple(u + e - 1 for u, e in zip(U.extent, H.extent))
        self.shape = tuple(spec.moduli) + tuple(scipy.fft.next_fast_len(n) for n in self.x_extent)
        kern = H.mask.astype(np.float64)
        for ax in range(self.m):
            kern = np.roll(np.flip(kern, axis=ax), 1, axis=ax)
        for j in range(spec.rank):
            kern = np.flip(kern, axis=self.m + j)
        self.trivial = spec.dim == 0
        if not self.trivial:
            self.kernel_hat = scipy.fft.rfftn(kern, s=self.shape)
        self.H_size = int(H.mask.sum())

    def counts(self, mask: np.ndarray) -> np.ndarray:
        if self.trivial:
            return np.asarray(int(mask) * self.H_size, dtype=np.int64)
        spec_hat = scipy.fft.rfftn(mask.astype(np.float64), s=self.shape)
        full = scipy.fft.irfftn(spec_hat * self.kernel_hat, s=self.shape)
        sl = tuple([slice(None)] * self.m + [slice(0, n) for n in self.x_extent])
        return np.rint(full[sl]).astype(np.int64)

    def point(self, flat_index: int) -> np.ndarray:
        idx = np.asarray(np.unravel_index(flat_index, tuple(self.spec.moduli) + self.x_extent), dtype=np.int64)
        idx[self.m :] += self.x_lo
        return idx

    def lookup(self, counts: np.ndarray, rows: np.ndarray) -> np.ndarray:
        """Counts at the translates ``rows`` (0 outside the candidate box)."""
        m = self.m
        idx = as_rows(rows, self.spec.dim).copy()
        if m:
            idx[:, :m] %= np.asarray(self.spec.moduli, dtype=np.int64)
        idx[:, m:] -= self.x_lo
        inside = np.all((idx[:, m:] >= 0) & (idx[:, m:] < np.asarray(self.x_extent, dtype=np.int64)), axis=1)
        out = np.zeros(len(idx), dtype=np.int64)
        if self.trivial:
            out[:] = int(counts)
        else:
            out[inside] = counts[tuple(idx[inside].T)]
        return out


def useful_translates(A: PointSet, r: int, h: int, X: PointSet) -> PointSet:
    """The elements x of X with ``(x + hA) ∩ rhA`` nonempty."""
    _check_args(A, r, h)
    if not len(X):
        return X
    hA, rhA = sumset_pair(A, h, r * h)
    U, H = _dense(rhA), _dense(hA)
    cor = _Correlator(U, H)
    hits = cor.lookup(cor.counts(U.mask), X.rows) > 0
    return PointSet(X.spec, X.rows[hits])


def candidate_translates(A: PointSet, r: int, h: int) -> PointSet:
    """All x with ``(x + hA) ∩ rhA`` nonempty, i.e. the difference set ``rhA - hA``."""
    _check_args(A, r, h)
    hA, rhA = sumset_pair(A, h, r * h)
    U, H = _dense(rhA), _dense(hA)
    cor = _Correlator(U, H)
    counts = cor.counts(U.mask)
    flat = np.flatnonzero(np.asarray(counts).ravel() > 0)
    rows = np.stack([cor.point(i) for i in flat]) if len(flat) else np.zeros((0, A.spec.dim), np.int64)
    return PointSet(A.spec, rows)


def _clear(view, src, out):
    np.logical_and(view, np.logical_not(src), out=out)


def greedy_cover(A: PointSet, r: int, h: int) -> PointSet:
    """Greedy set cover of rhA by translates of hA.

    Each step takes the translate covering the most uncovered points; ties
    go to the least translate in the canonical order.
    """
    _check_args(A, r, h)
    hA, rhA = sumset_pair(A, h, r * h)
    U, H = _dense(rhA), _dense(hA)
    cor = _Correlator(U, H)
    uncovered = DenseSet(U.spec, U.lo, U.mask.copy())
    chosen = []
    while uncovered.mask.any():
        counts = cor.counts(uncovered.mask)
        best = int(np.argmax(counts))
        x = cor.point(best)
        chosen.append(x)
        H.shifted_into(uncovered, x, op=_clear)
    return PointSet.from_rows(A.spec, np.asarray(chosen, dtype=np.int64).reshape(len(chosen), A.spec.dim))


# --- exact minimum cover ---------------------------------------------------


class MinimalCover(NamedTuple):
    cover: PointSet
    optimal: bool


class _BudgetExhausted(Exception):
    pass


def minimal_cover(A: PointSet, r: int, h: int, budget: int = DEFAULT_BUDGET) -> MinimalCover:
    """Minimum-cardinality X with ``rhA ⊆ X + hA`` by branch and bound.

    Seeded with the greedy cover and pruned with the counting bound.  When
    the node budget runs out the best cover found so far is returned with
    ``optimal=False``.  Raises :class:`ResourceError` when the universe or
    the bitset work exceeds the configured caps.
    """
    _check_args(A, r, h)
    hA, rhA = sumset_pair(A, h, r * h)
    U, H = _dense(rhA), _dense(hA)
    N = len(U)
    if N > MAX_UNIVERSE:
        raise ResourceError(f"universe of {N} points exceeds APXGRP_MAX_UNIVERSE={MAX_UNIVERSE}")
    spec = A.spec
    greedy = greedy_cover(A, r, h)
    lb = -(-N // len(H))
    if len(greedy) <= lb:
        return MinimalCover(greedy, True)

    cor = _Correlator(U, H)
    counts = np.asarray(cor.counts(U.mask)).ravel()
    cand_flat = np.flatnonzero(counts > 0)
    M = len(cand_flat)
    if M * N > MINIMAL_WORK_CAP:
        raise ResourceError(f"exact search would materialise {M} x {N} coverage bits")

    index = np.full(U.mask.shape, -1, dtype=np.int64)
    index[U.mask] = np.arange(N)
    h_rows = as_pointset(hA).rows
    masks: list[int] = []
    points: list[np.ndarray] = []
    seen: dict[int, int] = {}
    for flat in cand_flat:
        x = cor.point(int(flat))
        inside, idx = U.index_of(h_rows + x)
        ids = index[idx]
        ids = ids[ids >= 0]
        bits = np.zeros(N, dtype=bool)
        bits[ids] = True
        mask = int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")
        if mask in seen:
            continue
        seen[mask] = len(masks)
        masks.append(mask)
        points.append(x)
    if len(masks) <= 3000:
        # a translate covering a subset of another is never needed
        order = sorted(range(len(masks)), key=lambda i: -masks[i].bit_count())
        kept = []
        for i in order:
            if not any(masks[i] & ~masks[j] == 0 for j in kept):
                kept.append(i)
        kept.sort()
        masks = [masks[i] for i in kept]
        points = [points[i] for i in kept]

    full = (1 << N) - 1
    by_element: list[list[int]] = [[] for _ in range(N)]
    for ci, mask in enumerate(masks):
        mm = mask
        while mm:
            low = mm & -mm
            by_element[low.bit_length() - 1].append(ci)
            mm ^= low
    maxgain = max(m.bit_count() for m in masks)

    best = [len(greedy), None]
    nodes = [0]

    def dfs(covered: int, chosen: list[int]):
        nodes[0] += 1
        if nodes[0] > budget:
            raise _BudgetExhausted
        if covered == full:
            if len(chosen) < best[0]:
                best[0], best[1] = len(chosen), list(chosen)
            return
        remaining = N - covered.bit_count()
        if len(chosen) + -(-remaining // maxgain) >= best[0]:
            return
        free_bits = full & ~covered
        e = (free_bits & -free_bits).bit_length() - 1
        opts = sorted(by_element[e], key=lambda ci: (-(masks[ci] & free_bits).bit_count(), ci))
        for ci in opts:
            chosen.append(ci)
            dfs(covered | masks[ci], chosen)
            chosen.pop()
            if best[0] <= lb:
                return

    optimal = True
    try:
        dfs(0, [])
    except _BudgetExhausted:
        optimal = False
    if best[1] is None:
        return MinimalCover(greedy, optimal)
    rows = np.asarray([points[ci] for ci in best[1]], dtype=np.int64).reshape(-1, spec.dim)
    return MinimalCover(PointSet.from_rows(spec, rows), optimal)


# --- h0 scans ---------------------------------------------------------------


@dataclass
class ScanRow:
    h: int
    greedy_size: int
    minimal_size: int | None
    lower_bound: int
    paper_bound: int | None

    @property
    def best_size(self) -> int:
        return self.greedy_size if self.minimal_size is None else min(self.greedy_size, self.minimal_size)


@dataclass
class ScanResult:
    """Empirical threshold; ``h0`` is only meaningful up to ``h_max``."""

    h0: int | None
    h_max: int
    ell: int
    rows: list[ScanRow] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "h0": self.h0,
            "h0_valid_up_to": self.h_max,
            "ell": self.ell,
            "table": [
                {
                    "h": row.h,
                    "greedy_size": row.greedy_size,
                    "minimal_size": row.minimal_size,
                    "lower_bound": row.lower_bound,
                    "paper_bound": row.paper_bound,
                }
                for row in self.rows
            ],
        }


def scan_h0(A: PointSet, r: int, ell: int, h_max: int, exact: bool = False, budget: int = DEFAULT_BUDGET, paper_bound: int | None = None) -> ScanResult:
    """Smallest h0 with a cover of size <= ell for every h in [h0, h_max].

    Greedy decides each h; the exact search runs when greedy exceeds
    ``ell`` (or always, with ``exact=True``).
    """
    if h_max < 1:
        raise DomainError("h_max must be >= 1")
    if ell < 1:
        return ScanResult(None, h_max, ell)
    rows = []
    for h in range(1, h_max + 1):
        g = len(greedy_cover(A, r, h))
        lb = lower_bound(A, r, h)
        mn = None
        if exact or g > ell:
            try:
                res = minimal_cover(A, r, h, budget)
                if res.optimal or len(res.cover) <= ell:
                    mn = len(res.cover)
            except ResourceError:
                mn = None
        rows.append(ScanRow(h, g, mn, lb, paper_bound))
    h0 = None
    for row in reversed(rows):
        if row.best_size > ell:
            break
        h0 = row.h
    return ScanResult(h0, h_max, ell, rows)
