from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lwmi.errors import InputError, ParseError, UndeclaredVariableError
from lwmi.formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    BoolVar,
    Not,
    Universe,
    atoms,
    condition_on,
    dumps_formula,
    evaluate_skeleton,
    formula_to_json,
    interpret,
    parse_formula,
    parse_rational,
    simplify,
)
from lwmi.polynomial import Polynomial

U = Universe(("A", "B"), ("x", "y"), ((0, 1), (0, 2)))


def atom_le(lhs, rhs):
    return {"op": "le", "lhs": lhs, "rhs": rhs}


def test_universe_validation():
    with pytest.raises(InputError):
        Universe(("x",), ("x",), ((0, 1),))
    with pytest.raises(InputError):
        Universe((), ("x",), ((1, 1),))
    assert U.M == 2 and U.N == 2 and U.box_volume() == 2


@pytest.mark.parametrize("value,expected", [
    (3, Fraction(3)), ("1/3", Fraction(1, 3)), ("0.25", Fraction(1, 4)), (0.1, Fraction(1, 10)),
])
def test_parse_rational(value, expected):
    assert parse_rational(value) == expected


def test_decimal_literals_stay_exact():
    f = parse_formula('{"op":"le","lhs":{"var":"x"},"rhs":{"const":0.1}}', U)
    assert f == Atom(Polynomial.affine([1, 0], Fraction(-1, 10)))


def test_ge_and_gt_flip_to_le():
    x = {"var": "x"}
    one = {"const": 1}
    ge = parse_formula({"op": "ge", "lhs": x, "rhs": one}, U)
    assert ge == Atom(Polynomial.affine([-1, 0], 1))
    assert parse_formula({"op": "gt", "lhs": x, "rhs": one}, U) == ge
    assert parse_formula({"op": "lt", "lhs": x, "rhs": one}, U) == \
        parse_formula(atom_le(x, one), U)


def test_undeclared_variable_reports_path():
    node = {"op": "and", "args": [{"var": "A"}, atom_le({"var": "z"}, {"const": 0})]}
    with pytest.raises(UndeclaredVariableError) as err:
        parse_formula(node, U)
    assert "$.args[1].lhs" in str(err.value)


@pytest.mark.parametrize("node", [
    {"op": "eq", "lhs": {"var": "x"}, "rhs": {"const": 0}},
    {"op": "xor", "args": []},
    {"const": 1},
    {"var": "x"},
    atom_le({"var": "A"}, {"const": 0}),
    atom_le({"op": "pow", "args": [{"var": "x"}, {"const": "1/2"}]}, {"const": 0}),
])
def test_rejected_formulas(node):
    with pytest.raises(ParseError):
        parse_formula(node, U)


def test_malformed_json_has_position():
    with pytest.raises(ParseError) as err:
        parse_formula('{"op": "and", ', U)
    assert err.value.position is not None


def test_condition_on_folds_booleans():
    x_le_half = Atom(Polynomial.affine([1, 0], Fraction(-1, 2)))
    f = And((BoolVar(0, "A"), Not(BoolVar(1, "B")), x_le_half))
    assert condition_on(f, (True, False)) == x_le_half
    assert condition_on(f, (False, False)) == FALSE
    assert simplify(And((TRUE, TRUE))) == TRUE


def test_skeleton_is_three_valued():
    a = Atom(Polynomial.affine([1, 0], -1))
    f = And((BoolVar(0), a))
    assert evaluate_skeleton(f, (True,), {}) is None
    assert evaluate_skeleton(f, (False,), {}) is False
    assert evaluate_skeleton(f, (True,), {a: True}) is True


def test_interpret_models():
    f = parse_formula({"op": "or", "args": [
        {"var": "A"}, atom_le({"op": "add", "args": [{"var": "x"}, {"var": "y"}]}, {"const": 1})]}, U)
    assert interpret(f, (True, False), (5, 5))
    assert interpret(f, (False, False), (Fraction(1, 2), Fraction(1, 2)))
    assert not interpret(f, (False, False), (1, 1))


leaf = st.sampled_from([
    {"var": "A"}, {"var": "B"},
    atom_le({"var": "x"}, {"const": "1/2"}),
    {"op": "gt", "lhs": {"op": "mul", "args": [{"const": 2}, {"var": "y"}]}, "rhs": {"var": "x"}},
])
trees = st.recursive(
    leaf,
    lambda kids: st.one_of(
        st.builds(lambda a: {"op": "not", "args": [a]}, kids),
        st.builds(lambda xs: {"op": "and", "args": xs}, st.lists(kids, min_size=1, max_size=3)),
        st.builds(lambda xs: {"op": "or", "args": xs}, st.lists(kids, min_size=1, max_size=3)),
    ),
    max_leaves=8,
)


@settings(max_examples=60, deadline=None)
@given(trees, st.tuples(st.booleans(), st.booleans()),
       st.tuples(st.fractions(0, 1, max_denominator=8), st.fractions(0, 2, max_denominator=8)))
def test_json_round_trip_preserves_semantics(node, b, x):
    f = parse_formula(node, U)
    g = parse_formula(json.loads(dumps_formula(f, U)), U)
    assert interpret(f, b, x) == interpret(g, b, x)
    assert formula_to_json(g, U) == formula_to_json(f, U)
    assert len(atoms(g)) == len(atoms(f))
