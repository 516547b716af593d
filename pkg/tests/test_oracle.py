from __future__ import annotations

import pytest

from lwmi.errors import CapacityError, InputError
from lwmi.formula import FALSE, Atom, Universe
from lwmi.oracle import GridSpec, grid_oracle
from lwmi.polynomial import Polynomial
from lwmi.wmi import Problem
from test_wmi import fixture_problem

TRIANGLE = Problem(
    Universe((), ("x", "y"), ((0, 1), (0, 1))),
    Atom(Polynomial.affine([1, 1], -1)),
)


def test_triangle_area():
    assert abs(grid_oracle(TRIANGLE, 1000).value - 0.5) <= 2e-3


def test_two_and_a_half_fixture():
    assert abs(grid_oracle(fixture_problem(), 10_000).value - 2.5) <= 1e-3


def test_empty_formula_is_exactly_zero():
    p = fixture_problem(formula=FALSE)
    assert grid_oracle(p, 100).value == 0


def test_deterministic():
    assert grid_oracle(TRIANGLE, 300) == grid_oracle(TRIANGLE, 300)


@pytest.mark.parametrize("a,b,c", [(3, 7, 5), (1, 1, 1)])
def test_doubling_resolution_halves_error(a, b, c):
    # both regions have area exactly 1/2 inside the unit square
    p = Problem(Universe((), ("x", "y"), ((0, 1), (0, 1))), Atom(Polynomial.affine([a, b], -c)))
    errors = [abs(grid_oracle(p, R).value - 0.5) for R in (250, 500, 1000)]
    assert errors[1] <= errors[0] / 2 * 1.05
    assert errors[2] <= errors[1] / 2 * 1.05


def test_guards():
    with pytest.raises(InputError):
        GridSpec(1)
    with pytest.raises(CapacityError):
        grid_oracle(replace_universe_3d(), 1000)
    with pytest.raises(InputError):
        grid_oracle(Problem(Universe(("A",)), FALSE), 10)


def replace_universe_3d():
    return Problem(Universe((), ("x", "y", "z"), ((0, 1),) * 3), FALSE)
