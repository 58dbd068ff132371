"""Exact Fourier-Motzkin projection of rational polyhedra.

A constraint ``Ineq(coeffs, const, strict)`` means
``sum(coeffs[i] * x[i]) + const >= 0`` (``> 0`` when ``strict``).
Equalities ``Eq(coeffs, const)`` mean ``... == 0`` and are eliminated by
substitution before any pairing happens.  Strictness is carried through
every combination, so half-open boxes are handled without perturbation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ResourceError

MAX_CONSTRAINTS = 20000


@dataclass(frozen=True)
class Ineq:
    coeffs: tuple[Fraction, ...]
    const: Fraction
    strict: bool = False

    def holds(self, x: Sequence) -> bool:
        v = sum((c * xi for c, xi in zip(self.coeffs, x) if c), Fraction(0)) + self.const
        return v > 0 if self.strict else v >= 0


@dataclass(frozen=True)
class Eq:
    coeffs: tuple[Fraction, ...]
    const: Fraction

    def holds(self, x: Sequence) -> bool:
        return sum((c * xi for c, xi in zip(self.coeffs, x) if c), Fraction(0)) + self.const == 0


def _frac(seq) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in seq)


def ineq(coeffs, const, strict=False) -> Ineq:
    return Ineq(_frac(coeffs), Fraction(const), strict)


def eq(coeffs, const) -> Eq:
    return Eq(_frac(coeffs), Fraction(const))


def _normalize(c: Ineq) -> Ineq:
    """Scale to integer coefficients with gcd 1 (positive scaling only)."""
    vals = c.coeffs + (c.const,)
    den = math.lcm(*(v.denominator for v in vals))
    ints = [int(v * den) for v in vals]
    g = math.gcd(*ints)
    if g == 0:
        return c
    return Ineq(tuple(Fraction(v // g) for v in ints[:-1]), Fraction(ints[-1] // g), c.strict)


class Infeasible(Exception):
    pass


def _dedupe(cons: list[Ineq]) -> list[Ineq]:
    best: dict[tuple, Ineq] = {}
    for c in cons:
        c = _normalize(c)
        if not any(c.coeffs):
            if c.const < 0 or (c.strict and c.const == 0):
                raise Infeasible
            continue
        prev = best.get(c.coeffs)
        # same normal: the smaller constant is the tighter bound; strict wins ties
        if prev is None or c.const < prev.const or (c.const == prev.const and c.strict):
            best[c.coeffs] = c
    return list(best.values())


@dataclass
class Projection:
    """Constraints left on the kept variables after elimination."""

    nvars: int
    eqs: list[Eq]
    ineqs: list[Ineq]
    feasible: bool = True

    def holds(self, x: Sequence) -> bool:
        if not self.feasible:
            return False
        return all(e.holds(x) for e in self.eqs) and all(c.holds(x) for c in self.ineqs)

    def holds_rows(self, X: np.ndarray, cols: Sequence[int]) -> np.ndarray:
        """Vectorised :meth:`holds` for integer points; ``cols`` maps row columns to variables."""
        X = np.asarray(X, dtype=np.int64)
        ok = np.full(len(X), self.feasible, dtype=bool)
        if not self.feasible or not len(X):
            return ok
        for cons, kind in [(self.eqs, "eq"), (self.ineqs, "ineq")]:
            for c in cons:
                vals = c.coeffs + (c.const,)
                den = math.lcm(*(v.denominator for v in vals))
                w = np.asarray([int(c.coeffs[v] * den) for v in cols], dtype=object)
                const = int(c.const * den)
                lhs = X.astype(object) @ w + const if len(cols) else np.full(len(X), const, dtype=object)
                lhs = np.asarray(lhs, dtype=object)
                if kind == "eq":
                    ok &= lhs == 0
                elif c.strict:
                    ok &= lhs > 0
                else:
                    ok &= lhs >= 0
        return ok


def _substitute(c, var: int, expr_coeffs, expr_const):
    """Replace ``x[var]`` in ``c`` by ``expr_coeffs . x + expr_const``."""
    a = c.coeffs[var]
    if not a:
        return c
    coeffs = tuple(
        (0 if i == var else ci) + a * ei for i, (ci, ei) in enumerate(zip(c.coeffs, expr_coeffs))
    )
    const = c.const + a * expr_const
    if isinstance(c, Eq):
        return Eq(coeffs, const)
    return Ineq(coeffs, const, c.strict)


def project(eqs: Sequence[Eq], ineqs: Sequence[Ineq], eliminate: Sequence[int], nvars: int) -> Projection:
    """Eliminate the variables ``eliminate`` from the system exactly."""
    eqs = list(eqs)
    cons = list(ineqs)
    try:
        cons = _dedupe(cons)
        for var in eliminate:
            piv = next((e for e in eqs if e.coeffs[var]), None)
            if piv is not None:
                a = piv.coeffs[var]
                expr = tuple(Fraction(0) if i == var else -ci / a for i, ci in enumerate(piv.coeffs))
                const = -piv.const / a
                eqs = [_substitute(e, var, expr, const) for e in eqs if e is not piv]
                cons = _dedupe([_substitute(c, var, expr, const) for c in cons])
                for e in eqs:
                    if not any(e.coeffs) and e.const:
                        raise Infeasible
                eqs = [e for e in eqs if any(e.coeffs)]
                continue
            pos = [c for c in cons if c.coeffs[var] > 0]
            neg = [c for c in cons if c.coeffs[var] < 0]
            out = [c for c in cons if not c.coeffs[var]]
            if len(pos) * len(neg) + len(out) > MAX_CONSTRAINTS:
                raise ResourceError(f"Fourier-Motzkin step would create {len(pos) * len(neg)} constraints")
            for p in pos:
                for n in neg:
                    a, b = p.coeffs[var], -n.coeffs[var]
                    coeffs = tuple(b * pc + a * nc for pc, nc in zip(p.coeffs, n.coeffs))
                    out.append(Ineq(coeffs, b * p.const + a * n.const, p.strict or n.strict))
            cons = _dedupe(out)
    except Infeasible:
        return Projection(nvars, [], [], feasible=False)
    return Projection(nvars, eqs, cons)


def feasible(eqs: Sequence[Eq], ineqs: Sequence[Ineq], nvars: int) -> bool:
    """Whether the system has a real solution (all variables eliminated)."""
    proj = project(eqs, ineqs, range(nvars), nvars)
    return proj.holds([0] * nvars)
