"""Integer lattices spanned by finitely many vectors of Z^n (Hermite normal form)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import MembershipError


def hnf_with_transform(vectors: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]], list[int]]:
    """Row-style Hermite normal form.

    Returns ``(H, U, pivots)`` with ``U`` unimodular and ``U @ G == H`` where
    ``G`` has the input vectors as rows.  The first ``len(pivots)`` rows of
    ``H`` are the HNF basis (positive pivots, entries above a pivot reduced
    into ``[0, pivot)``); the remaining rows are zero, so the matching rows of
    ``U`` span the integer relations among the inputs.
    """
    H = [[int(v) for v in row] for row in vectors]
    q = len(H)
    n = len(H[0]) if q else 0
    U = [[int(i == j) for j in range(q)] for i in range(q)]

    def sub(i, j, f):
        # row_i -= f * row_j
        if f:
            H[i] = [a - f * b for a, b in zip(H[i], H[j])]
            U[i] = [a - f * b for a, b in zip(U[i], U[j])]

    def swap(i, j):
        if i != j:
            H[i], H[j] = H[j], H[i]
            U[i], U[j] = U[j], U[i]

    pivots: list[int] = []
    row = 0
    for col in range(n):
        if row == q:
            break
        found = False
        while True:
            nz = [i for i in range(row, q) if H[i][col]]
            if not nz:
                break
            found = True
            swap(row, min(nz, key=lambda i: (abs(H[i][col]), i)))
            clean = True
            for i in range(row + 1, q):
                if H[i][col]:
                    sub(i, row, H[i][col] // H[row][col])
                    clean = clean and not H[i][col]
            if clean:
                break
        if not found:
            continue
        if H[row][col] < 0:
            H[row] = [-a for a in H[row]]
            U[row] = [-a for a in U[row]]
        for i in range(row):
            sub(i, row, H[i][col] // H[row][col])
        pivots.append(col)
        row += 1
    return H, U, pivots


@dataclass(frozen=True)
class LatticeBasis:
    """HNF basis of the integer span of ``generators``.

    ``transform[j]`` expresses row ``j`` of the HNF (for ``j < rank``) or an
    integer relation (for ``j >= rank``) as a combination of the generators.
    """

    ambient_rank: int
    generators: tuple[tuple[int, ...], ...]
    basis: tuple[tuple[int, ...], ...]
    pivots: tuple[int, ...]
    transform: tuple[tuple[int, ...], ...]

    @classmethod
    def from_generators(cls, generators: Sequence[Sequence[int]], ambient_rank: int) -> LatticeBasis:
        gens = tuple(tuple(int(v) for v in g) for g in generators)
        H, U, piv = hnf_with_transform(gens) if gens else ([], [], [])
        d = len(piv)
        return cls(ambient_rank, gens, tuple(tuple(r) for r in H[:d]), tuple(piv), tuple(tuple(r) for r in U))

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def kernel(self) -> tuple[tuple[int, ...], ...]:
        """Integer relations ``z`` with ``sum z_i g_i = 0`` (a basis of them)."""
        return self.transform[self.rank :]

    def coordinates(self, v: Sequence[int]) -> list[int] | None:
        """Coordinates of ``v`` over the HNF rows, or ``None`` if ``v`` is not in the lattice."""
        rest = [int(x) for x in v]
        ys = []
        for row, col in zip(self.basis, self.pivots):
            if any(rest[:col]):
                return None
            y, r = divmod(rest[col], row[col])
            if r:
                return None
            ys.append(y)
            if y:
                rest = [a - y * b for a, b in zip(rest, row)]
        return ys if not any(rest) else None

    def __contains__(self, v: Sequence[int]) -> bool:
        return self.coordinates(v) is not None

    def particular_solution(self, v: Sequence[int]) -> list[int]:
        """Some integer ``z`` with ``sum z_i g_i = v``."""
        ys = self.coordinates(v)
        if ys is None:
            raise MembershipError(f"{tuple(v)} is not in the lattice spanned by {self.generators}")
        q = len(self.generators)
        z = [0] * q
        for y, urow in zip(ys, self.transform):
            if y:
                z = [a + y * b for a, b in zip(z, urow)]
        return z

    def combine(self, z: Sequence[int]) -> tuple[int, ...]:
        out = [0] * self.ambient_rank
        for zi, g in zip(z, self.generators):
            if zi:
                out = [a + zi * b for a, b in zip(out, g)]
        return tuple(out)
