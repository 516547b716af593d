from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from corpus import random_linear_atom, random_tree
from lwmi.errors import CapacityError, InputError
from lwmi.formula import FALSE, TRUE, Atom, BoolVar, Not, Or, Universe, evaluate_array
from lwmi.geometry import volume
from lwmi.oracle import grid_oracle
from lwmi.polynomial import Polynomial
from lwmi.region import canonical_atom, decompose, is_empty
from lwmi.wmi import Problem

x_le = lambda c: Atom(Polynomial.affine([1], -c))  # noqa: E731


def test_overlapping_disjunction_splits_into_disjoint_cells():
    f = Or((x_le(1), Not(x_le(0))))
    cells = decompose(f, [(-2, 2)])
    assert sorted(volume(c.polytope) for c in cells) == [1, 1, 2]


def test_canonical_atoms_merge():
    two = Atom(Polynomial.affine([2], -2))
    assert canonical_atom(two) == x_le(1)
    cells = decompose(Or((two, x_le(1))), [(0, 3)])
    assert len(cells) == 1 and cells[0].truth(two)


def test_false_and_true():
    assert decompose(FALSE, [(0, 1)]) == []
    (cell,) = decompose(TRUE, [(0, 1)])
    assert volume(cell.polytope) == 1


def test_rejects_booleans_and_caps():
    with pytest.raises(InputError):
        decompose(BoolVar(0), [(0, 1)])
    atoms = [x_le(Fraction(i, 30)) for i in range(25)]
    with pytest.raises(CapacityError):
        decompose(Or(tuple(atoms)), [(0, 1)])


def test_nonlinear_cells_are_semialgebraic():
    disc = Atom(Polynomial(2, {(2, 0): 1, (0, 2): 1, (0, 0): -1}))
    cells = decompose(disc, [(-1, 1), (-1, 1)])
    assert [c.kind for c in cells] == ["semialgebraic"]
    assert cells[0].contains((0, 0)) and not cells[0].contains((1, 1))
    assert not is_empty(cells[0])


def test_cells_cover_formula_like_grid():
    rng = random.Random(4)
    for _ in range(15):
        bounds = ((Fraction(-1), Fraction(1)), (Fraction(0), Fraction(2)))
        leaves = [random_linear_atom(rng, 2, bounds) for _ in range(rng.randint(1, 4))]
        f = random_tree(rng, leaves, 3)
        cells = decompose(f, bounds)
        total = sum(volume(c.polytope) for c in cells)
        R = 200
        grid = grid_oracle(Problem(Universe((), ("x", "y"), bounds), f), R).value
        assert abs(float(total) - grid) <= 2 * 4 / R * 4
        # cells are disjoint up to boundaries: no interior point lies in two cells
        X = np.random.default_rng(0).uniform([-1, 0], [1, 2], size=(2000, 2))
        counts = sum(c.member_array(X).astype(int) for c in cells) if cells else np.zeros(2000)
        inside = evaluate_array(f, X)
        assert np.all(counts[inside] >= 1)
        assert np.mean(counts > 1) < 0.01
