"""Elements and finite subsets of G = Z_{d1} x ... x Z_{dm} x Z^n.

Points are stored as flat integer rows, torsion residues first and free
coordinates after.  A :class:`PointSet` keeps its rows in a numpy ``int64``
array that is sorted lexicographically and duplicate free, so equality of
sets is equality of arrays.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import EmptySetError, GroupOverflowError, SpecMismatchError

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


def as_rows(arr, dim: int) -> np.ndarray:
    """View ``arr`` as an ``(N, dim)`` int64 array; handles ``dim == 0``."""
    arr = np.asarray(arr, dtype=np.int64)
    if dim == 0:
        return np.zeros((arr.shape[0] if arr.ndim else 0, 0), dtype=np.int64)
    return arr.reshape(-1, dim)


def check_int64(value: int) -> int:
    if value < INT64_MIN or value > INT64_MAX:
        raise GroupOverflowError(f"free coordinate {value} does not fit in 64 bits")
    return value


@dataclass(frozen=True)
class GroupSpec:
    """The group Z_{d1} x ... x Z_{dm} x Z^rank."""

    moduli: tuple[int, ...] = ()
    rank: int = 0

    def __post_init__(self):
        moduli = tuple(int(d) for d in self.moduli)
        object.__setattr__(self, "moduli", moduli)
        object.__setattr__(self, "rank", int(self.rank))
        if any(d < 2 for d in moduli):
            raise ValueError(f"every modulus must be >= 2, got {moduli}")
        if self.rank < 0:
            raise ValueError(f"rank must be >= 0, got {self.rank}")

    @property
    def ntorsion(self) -> int:
        return len(self.moduli)

    @property
    def dim(self) -> int:
        """Length of the flat coordinate row."""
        return len(self.moduli) + self.rank

    @property
    def torsion_order(self) -> int:
        """|G0|, the order of the finite part."""
        return math.prod(self.moduli)

    @property
    def is_torsion_free(self) -> bool:
        return not self.moduli

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    @property
    def is_trivial(self) -> bool:
        return not self.moduli and self.rank == 0

    def identity(self) -> GroupElement:
        return GroupElement(self, (0,) * self.ntorsion, (0,) * self.rank)

    def element(self, coords: Sequence[int]) -> GroupElement:
        """Build an element from a flat row ``[t1..tm, z1..zn]``."""
        coords = [int(v) for v in coords]
        if len(coords) != self.dim:
            raise SpecMismatchError(f"expected {self.dim} coordinates, got {len(coords)}")
        m = self.ntorsion
        return GroupElement(self, tuple(coords[:m]), tuple(coords[m:]))

    def torsion_elements(self) -> list[tuple[int, ...]]:
        """All residue tuples of G0 in lexicographic order."""
        grids = np.indices(self.moduli).reshape(self.ntorsion, -1).T if self.moduli else np.zeros((1, 0), int)
        return [tuple(int(v) for v in row) for row in grids]

    def product(self, other: GroupSpec) -> GroupSpec:
        """Spec of ``self x other`` with torsion factors merged in front."""
        return GroupSpec(self.moduli + other.moduli, self.rank + other.rank)

    def to_json(self) -> dict:
        return {"moduli": list(self.moduli), "rank": self.rank}

    @classmethod
    def from_json(cls, doc: dict) -> GroupSpec:
        return cls(tuple(doc.get("moduli", ())), int(doc.get("rank", 0)))

    def __str__(self):
        parts = [f"Z_{d}" for d in self.moduli]
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        return " x ".join(parts) or "{0}"


@dataclass(frozen=True)
class GroupElement:
    spec: GroupSpec
    torsion: tuple[int, ...]
    free: tuple[int, ...]

    def __post_init__(self):
        if len(self.torsion) != self.spec.ntorsion or len(self.free) != self.spec.rank:
            raise SpecMismatchError(f"element shape does not match {self.spec}")
        torsion = tuple(int(t) % d for t, d in zip(self.torsion, self.spec.moduli))
        free = tuple(check_int64(int(z)) for z in self.free)
        object.__setattr__(self, "torsion", torsion)
        object.__setattr__(self, "free", free)

    @property
    def coords(self) -> tuple[int, ...]:
        return self.torsion + self.free

    def _same(self, other: GroupElement):
        if not isinstance(other, GroupElement):
            return NotImplemented
        if other.spec != self.spec:
            raise SpecMismatchError(f"{self.spec} vs {other.spec}")
        return None

    def __add__(self, other: GroupElement) -> GroupElement:
        if self._same(other) is NotImplemented:
            return NotImplemented
        return GroupElement(
            self.spec,
            tuple(a + b for a, b in zip(self.torsion, other.torsion)),
            tuple(a + b for a, b in zip(self.free, other.free)),
        )

    def __neg__(self) -> GroupElement:
        return GroupElement(self.spec, tuple(-a for a in self.torsion), tuple(-a for a in self.free))

    def __sub__(self, other: GroupElement) -> GroupElement:
        if self._same(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __mul__(self, t: int) -> GroupElement:
        return scale(self, t)

    __rmul__ = __mul__

    def is_identity(self) -> bool:
        return not any(self.torsion) and not any(self.free)

    def sort_key(self) -> tuple[int, ...]:
        return self.coords

    def __lt__(self, other: GroupElement) -> bool:
        return self.coords < other.coords

    def __str__(self):
        if not self.torsion:
            return str(self.free[0]) if len(self.free) == 1 else str(self.free)
        if not self.free:
            return str(self.torsion)
        return f"({' '.join(map(str, self.torsion))} | {' '.join(map(str, self.free))})"


def add(a: GroupElement, b: GroupElement) -> GroupElement:
    return a + b


def scale(a: GroupElement, t: int) -> GroupElement:
    """The t-fold sum of ``a``; negative ``t`` sums the inverse."""
    t = int(t)
    return GroupElement(a.spec, tuple(t * x for x in a.torsion), tuple(t * x for x in a.free))


def _canonical_rows(arr: np.ndarray, spec: GroupSpec) -> np.ndarray:
    """Reduce torsion, sort lexicographically and drop duplicate rows."""
    arr = as_rows(arr, spec.dim).copy()
    if spec.moduli:
        arr[:, : spec.ntorsion] %= np.asarray(spec.moduli, dtype=np.int64)
    if len(arr) <= 1 or spec.dim == 0:
        return arr[:1] if spec.dim == 0 else arr
    order = np.lexsort(arr.T[::-1])
    arr = arr[order]
    keep = np.empty(len(arr), dtype=bool)
    keep[0] = True
    np.any(arr[1:] != arr[:-1], axis=1, out=keep[1:])
    return arr[keep]


class PointSet:
    """A canonical finite subset of a :class:`GroupSpec`.

    Build instances with :func:`canonicalize` or :meth:`from_rows`; the
    constructor trusts that ``rows`` is already canonical.
    """

    __slots__ = ("spec", "_rows", "_hash")

    def __init__(self, spec: GroupSpec, rows: np.ndarray):
        rows = as_rows(rows, spec.dim)
        rows.setflags(write=False)
        self.spec = spec
        self._rows = rows
        self._hash = None

    @classmethod
    def from_rows(cls, spec: GroupSpec, rows, nonempty: bool = False) -> PointSet:
        if spec.dim == 0:
            arr = np.zeros((len(rows), 0), dtype=np.int64)
        elif isinstance(rows, np.ndarray) and rows.dtype.kind in "iu":
            arr = as_rows(rows, spec.dim)
        else:
            arr = as_rows([[check_int64(int(v)) for v in row] for row in rows], spec.dim)
        if nonempty and len(arr) == 0:
            raise EmptySetError("a nonempty point set is required")
        return cls(spec, _canonical_rows(arr, spec))

    @classmethod
    def of(cls, spec: GroupSpec, *points) -> PointSet:
        """Convenience constructor; scalars are accepted for 1-dimensional groups."""
        rows = [[p] if np.ndim(p) == 0 else list(p) for p in points]
        return cls.from_rows(spec, rows)

    @property
    def rows(self) -> np.ndarray:
        return self._rows

    @property
    def torsion_rows(self) -> np.ndarray:
        return self._rows[:, : self.spec.ntorsion]

    @property
    def free_rows(self) -> np.ndarray:
        return self._rows[:, self.spec.ntorsion :]

    def __len__(self):
        return len(self._rows)

    def __iter__(self) -> Iterator[GroupElement]:
        for row in self._rows:
            yield self.spec.element(row)

    def __getitem__(self, i: int) -> GroupElement:
        return self.spec.element(self._rows[i])

    def __contains__(self, g: GroupElement) -> bool:
        if g.spec != self.spec:
            return False
        return bool(np.any(np.all(self._rows == np.asarray(g.coords, dtype=np.int64), axis=1)))

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self._rows, other._rows)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.spec, self._rows.tobytes(), self._rows.shape))
        return self._hash

    def __repr__(self):
        pts = ", ".join(str(p) for p in list(self)[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"PointSet({self.spec}, {{{pts}{more}}})"

    def tuples(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self._rows]

    def issubset(self, other: PointSet) -> bool:
        return set(self.tuples()) <= set(other.tuples())

    def min(self) -> GroupElement:
        """Smallest element in the canonical order."""
        if not len(self):
            raise EmptySetError("empty set has no minimum")
        return self[0]

    def require_nonempty(self) -> PointSet:
        if not len(self):
            raise EmptySetError("a nonempty point set is required")
        return self

    def to_json(self) -> dict:
        return {"group": self.spec.to_json(), "points": [list(t) for t in self.tuples()]}

    @classmethod
    def from_json(cls, doc: dict) -> PointSet:
        spec = GroupSpec.from_json(doc["group"])
        pts = doc["points"]
        for p in pts:
            if len(p) != spec.dim or not all(isinstance(v, int) and not isinstance(v, bool) for v in p):
                raise ValueError(f"point {p!r} does not match group {spec}")
        return cls.from_rows(spec, pts)

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form."""
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()


def canonicalize(raw: Iterable[GroupElement], spec: GroupSpec, nonempty: bool = True) -> PointSet:
    """Sort and deduplicate ``raw`` into a :class:`PointSet`."""
    rows = []
    for g in raw:
        if g.spec != spec:
            raise SpecMismatchError(f"element of {g.spec} given for {spec}")
        rows.append(g.coords)
    if nonempty and not rows:
        raise EmptySetError("a nonempty point set is required")
    if not rows:
        return PointSet(spec, np.zeros((0, spec.dim), np.int64))
    return PointSet.from_rows(spec, rows)


def singleton(g: GroupElement) -> PointSet:
    return PointSet(g.spec, np.asarray([g.coords], dtype=np.int64).reshape(1, g.spec.dim))


def whole_torsion_group(spec: GroupSpec) -> PointSet:
    """G0 as a point set; only defined for finite groups."""
    if not spec.is_finite:
        raise ValueError(f"{spec} is infinite")
    return PointSet.from_rows(spec, spec.torsion_elements())
