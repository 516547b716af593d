"""Disjoint cell decomposition of real-only formulas.

Every sign vector over the distinct atoms of a formula that makes its
propositional skeleton true defines one cell: the conjunction of the atoms
taken as ``expr <= 0`` or, when negated, as the closed complement
``-expr <= 0``.  Distinct sign vectors overlap only on atom boundaries,
which are Lebesgue-null, so cells can be integrated and summed
independently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, InputError
from .formula import (
    FALSE,
    Atom,
    Formula,
    Universe,
    atoms,
    bool_vars,
    evaluate_skeleton,
    simplify,
)
from .geometry import Halfspace, Polytope
from .polynomial import poly_eval, poly_eval_array

ATOM_CAP = 20
EMPTINESS_SAMPLES = 4096


def canonical_atom(atom: Atom) -> Atom:
    """Scale ``expr`` by a positive constant so its leading coefficient is +-1.

    Positive scaling does not change the atom's truth set, so syntactically
    different but equivalent atoms such as ``2x - 2 <= 0`` and ``x - 1 <= 0``
    collapse to one.
    """
    expr = atom.expr
    if expr.is_zero():
        return atom
    lead = next(iter(expr.items()))[1]
    return Atom(expr * (1 / abs(lead)))


def atom_halfspace(atom: Atom, truth: bool) -> Halfspace:
    a, c = atom.expr.linear_part()
    h = Halfspace(a, -c)
    return h if truth else h.complement()


@dataclass
class Cell:
    """One cell of a decomposition.

    ``signs`` gives, for every atom involved (original and canonical forms),
    whether the cell lies in ``expr <= 0`` (``True``) or in its closed
    complement.  Polytope cells carry an exact :class:`Polytope`;
    semialgebraic cells are membership-testable only.
    """

    signs: dict[Atom, bool]
    bounds: tuple[tuple[Fraction, Fraction], ...]
    polytope: Polytope | None = None
    kind: str = "polytope"
    _defining: tuple[tuple[Atom, bool], ...] = field(default=(), repr=False)

    @property
    def exact(self) -> bool:
        return self.kind == "polytope"

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def truth(self, atom: Atom) -> bool:
        if atom in self.signs:
            return self.signs[atom]
        return self.signs[canonical_atom(atom)]

    def contains(self, x: Sequence) -> bool:
        if any(not lo <= v <= hi for v, (lo, hi) in zip(x, self.bounds)):
            return False
        for atom, truth in self._defining:
            value = poly_eval(atom.expr, x)
            if (value <= 0) if truth else (value >= 0):
                continue
            return False
        return True

    def member_array(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        inside = np.ones(X.shape[0], dtype=bool)
        for i, (lo, hi) in enumerate(self.bounds):
            inside &= (X[:, i] >= float(lo)) & (X[:, i] <= float(hi))
        for atom, truth in self._defining:
            v = poly_eval_array(atom.expr, X)
            inside &= (v <= 0) if truth else (v >= 0)
        return inside


def _bounds_of(box) -> tuple[tuple[Fraction, Fraction], ...]:
    if isinstance(box, Universe):
        return box.bounds
    return tuple((Fraction(lo), Fraction(hi)) for lo, hi in box)


def decompose(f: Formula, box, extra_atoms: Iterable[Atom] = (), *,
              atom_cap: int = ATOM_CAP) -> list[Cell]:
    """Disjoint cover of ``M(f) & box`` by cells.

    ``extra_atoms`` (e.g. real conditions inside a piecewise weight) refine
    the decomposition without changing its union, so that each cell fixes
    their truth values too.  Infeasible polytope cells are dropped; cells
    that are feasible but lower-dimensional are kept (they integrate to 0).
    """
    if bool_vars(f):
        raise InputError("decompose expects a real-only formula; condition on Booleans first")
    bounds = _bounds_of(box)
    f = simplify(f)
    if f == FALSE:
        return []
    originals = [a for a in atoms(f) + list(extra_atoms) if not a.expr.is_constant()]
    for a in originals:
        if a.expr.nvars != len(bounds):
            raise InputError("atom dimension does not match the bounding box")
    alias = {a: canonical_atom(a) for a in originals}
    distinct = list(dict.fromkeys(alias.values()))
    if len(distinct) > atom_cap:
        raise CapacityError(f"{len(distinct)} distinct atoms exceeds the cap of {atom_cap}")
    linear = all(a.expr.is_linear() for a in distinct)
    base = Polytope.box(bounds) if linear else None

    cells: list[Cell] = []
    values: dict[Atom, bool] = {}

    def skeleton():
        known = {a: values[c] for a, c in alias.items() if c in values}
        return evaluate_skeleton(f, {}, known)

    def search(i: int, poly: Polytope | None, chosen: list):
        verdict = skeleton()
        if verdict is False:
            return
        if poly is not None and i > 0 and poly.is_empty():
            return
        if i == len(distinct):
            if verdict is not True:
                raise AssertionError("skeleton undetermined with all atoms fixed")
            signs = {a: values[c] for a, c in alias.items()}
            signs.update(values)
            cells.append(Cell(signs, bounds, poly, "polytope" if linear else "semialgebraic",
                              tuple(chosen)))
            return
        atom = distinct[i]
        for truth in (True, False):
            values[atom] = truth
            child = poly.intersect([atom_halfspace(atom, truth)]) if poly is not None else None
            chosen.append((atom, truth))
            search(i + 1, child, chosen)
            chosen.pop()
            del values[atom]

    search(0, base, [])
    return cells


def is_empty(cell: Cell, *, samples: int = EMPTINESS_SAMPLES, seed: int = 0) -> bool:
    """Exact for polytope cells; for semialgebraic cells, ``True`` when no
    seeded uniform sample falls inside (a presumption, not a proof)."""
    if cell.polytope is not None:
        return cell.polytope.is_empty()
    rng = np.random.Generator(np.random.Philox(seed))
    lo = np.array([float(a) for a, _ in cell.bounds])
    hi = np.array([float(b) for _, b in cell.bounds])
    X = lo + (hi - lo) * rng.random((samples, cell.dim))
    return not cell.member_array(X).any()

