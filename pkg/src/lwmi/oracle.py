"""Brute-force midpoint-rule oracle for weighted model integrals.

Deliberately self-contained: formulas, polynomial atoms and weight trees
are evaluated here with plain numpy, reading only the data stored in the
AST nodes.  No polytope, triangulation or polynomial-integration code is
used, so a bug in those paths cannot cancel against this one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import CapacityError, InputError
from .formula import And, Atom, Bottom, BoolVar, Not, Or, Top
from .results import MeasureResult
from .weights import Add, BlackBox, Const, Ite, Mul, Pow, Var

CELL_CAP = 10**8
CHUNK_POINTS = 1 << 18


@dataclass(frozen=True)
class GridSpec:
    resolution: int = 1000

    def __post_init__(self):
        if self.resolution < 2:
            raise InputError("grid resolution must be at least 2")


def _terms_value(expr, X: np.ndarray) -> np.ndarray:
    out = np.zeros(X.shape[0])
    for exps, coef in expr.items():
        term = np.full(X.shape[0], coef.numerator / coef.denominator)
        for i, e in enumerate(exps):
            if e:
                term = term * X[:, i] ** e
        out += term
    return out


class _Evaluator:
    """Caches each atom's truth mask for one chunk of grid midpoints."""

    def __init__(self, X: np.ndarray):
        self.X = X
        self.cache: dict = {}

    def atom(self, a: Atom) -> np.ndarray:
        mask = self.cache.get(a)
        if mask is None:
            mask = _terms_value(a.expr, self.X) <= 0
            self.cache[a] = mask
        return mask

    def formula(self, f, b) -> np.ndarray:
        n = self.X.shape[0]
        if isinstance(f, Top):
            return np.ones(n, dtype=bool)
        if isinstance(f, Bottom):
            return np.zeros(n, dtype=bool)
        if isinstance(f, BoolVar):
            return np.full(n, bool(b[f.index]))
        if isinstance(f, Atom):
            return self.atom(f)
        if isinstance(f, Not):
            return ~self.formula(f.child, b)
        if isinstance(f, And):
            out = np.ones(n, dtype=bool)
            for c in f.children:
                out = out & self.formula(c, b)
            return out
        if isinstance(f, Or):
            out = np.zeros(n, dtype=bool)
            for c in f.children:
                out = out | self.formula(c, b)
            return out
        raise TypeError(f"unknown formula node {f!r}")

    def weight(self, w, b) -> np.ndarray:
        n = self.X.shape[0]
        if isinstance(w, Const):
            return np.full(n, w.value.numerator / w.value.denominator)
        if isinstance(w, Var):
            return self.X[:, w.index]
        if isinstance(w, Add):
            out = np.zeros(n)
            for a in w.args:
                out = out + self.weight(a, b)
            return out
        if isinstance(w, Mul):
            out = np.ones(n)
            for a in w.args:
                out = out * self.weight(a, b)
            return out
        if isinstance(w, Pow):
            return self.weight(w.base, b) ** w.exponent
        if isinstance(w, Ite):
            return np.where(self.formula(w.cond, b), self.weight(w.then, b),
                            self.weight(w.other, b))
        if isinstance(w, BlackBox):
            return np.asarray(w.fn(tuple(b), self.X), dtype=float)
        raise TypeError(f"unknown weight node {w!r}")


def grid_oracle(problem, grid: GridSpec | int | None = None) -> MeasureResult:
    """Midpoint Riemann sum of ``w * 1_M(phi)`` over ``B^M x box``.

    The grid has ``R`` cells per axis.  Stripes along the first axis are
    processed in fixed order and their partial sums combined with
    :func:`math.fsum`, so the result is deterministic.
    """
    if grid is None:
        grid = GridSpec(problem.oracle_resolution)
    elif isinstance(grid, int):
        grid = GridSpec(grid)
    u = problem.universe
    R, N = grid.resolution, u.N
    if N < 1:
        raise InputError("the grid oracle needs at least one real variable")
    if R ** N > CELL_CAP:
        raise CapacityError(f"{R}^{N} grid cells exceeds the cap of {CELL_CAP}")
    lo = np.array([float(a) for a, _ in u.bounds])
    width = np.array([float(b - a) for a, b in u.bounds]) / R
    cellvol = float(np.prod(width))
    mids = [lo[i] + (np.arange(R) + 0.5) * width[i] for i in range(N)]
    if N > 1:
        rest = np.stack(np.meshgrid(*mids[1:], indexing="ij"), axis=-1).reshape(-1, N - 1)
    else:
        rest = np.zeros((1, 0))
    stripes_per_chunk = max(1, CHUNK_POINTS // rest.shape[0])
    every_b = list(product((True, False), repeat=u.M))

    partial = {b: [] for b in every_b}
    for start in range(0, R, stripes_per_chunk):
        first = mids[0][start:start + stripes_per_chunk]
        X = np.column_stack([np.repeat(first, rest.shape[0]),
                             np.tile(rest, (first.shape[0], 1))])
        ev = _Evaluator(X)
        for b in every_b:
            mask = ev.formula(problem.formula, b)
            if mask.any():
                partial[b].append(float(np.sum(ev.weight(problem.weight, b)[mask])))
    breakdown = {b: math.fsum(v) * cellvol for b, v in partial.items() if v}
    return MeasureResult(math.fsum(breakdown.values()), "oracle", breakdown=breakdown,
                         cells=R ** N, definition="WMI")
