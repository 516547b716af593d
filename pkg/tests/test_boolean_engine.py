from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

import pytest

from corpus import random_literal_pairs, random_propositional
from lwmi.boolean_engine import (
    AssignmentWeight,
    LiteralWeights,
    enumerate_models,
    lift_literal_weights,
    lwmc,
    wmc,
)
from lwmi.errors import CapacityError, InputError, NegativeWeightError
from lwmi.formula import FALSE, TRUE, Atom, BoolVar, Not, Or, interpret
from lwmi.polynomial import Polynomial

A, B, C = BoolVar(0, "A"), BoolVar(1, "B"), BoolVar(2, "C")


def test_wmc_of_disjunction():
    lw = LiteralWeights(((Fraction(1, 3), Fraction(2, 3)), (Fraction(1, 4), Fraction(3, 4))))
    assert wmc(Or((A, B)), lw).value == 1 - Fraction(2, 3) * Fraction(3, 4)
    assert wmc(TRUE, lw).value == 1
    assert wmc(FALSE, lw).value == 0


def test_models_in_lexicographic_order():
    assert list(enumerate_models(Or((A, Not(B))), 2)) == [(True, True), (True, False), (False, False)]
    assert list(enumerate_models(TRUE, 0)) == [()]


def test_enumeration_matches_truth_table():
    rng = random.Random(3)
    for _ in range(30):
        f = random_propositional(rng, 5)
        expected = [b for b in product((True, False), repeat=5) if interpret(f, b)]
        assert list(enumerate_models(f, 5)) == expected


def test_lifted_weight_is_product_of_literals():
    lw = LiteralWeights(((2, 3), (5, 7)))
    w = lift_literal_weights(lw)
    assert w((True, False)) == 14
    assert w.table()[(False, True)] == 15


def test_lwmc_equals_wmc_on_random_corpus():
    rng = random.Random(11)
    for _ in range(40):
        M = rng.randint(1, 6)
        f = random_propositional(rng, M)
        lw = LiteralWeights(random_literal_pairs(rng, M))
        assert lwmc(f, lift_literal_weights(lw)).value == wmc(f, lw).value


def test_negative_weights_rejected():
    with pytest.raises(NegativeWeightError):
        LiteralWeights(((1, -1),))
    with pytest.raises(NegativeWeightError):
        AssignmentWeight(1, table={(True,): -1})


def test_caps_and_real_atoms():
    with pytest.raises(CapacityError):
        list(enumerate_models(TRUE, 30))
    with pytest.raises(InputError):
        wmc(Atom(Polynomial.affine([1], 0)), LiteralWeights(()))


def test_breakdown_sums_to_value():
    lw = LiteralWeights(((1, 2), (3, 4), (5, 6)))
    r = wmc(Or((A, C)), lw)
    assert sum(r.breakdown.values()) == r.value
