"""Piecewise weight expressions ``w: B^M x R^N -> R>=0``.

A weight is an expression tree over constants, real variables, ``+``,
``*``, integer powers and ``ite(condition, then, else)`` where the
condition is any formula of the universe.  Fixing the Boolean part
(:meth:`WeightSpec.section`) leaves a piecewise polynomial whose pieces are
selected by real atoms; on a decomposition cell those atoms have fixed
truth values and the weight is a single :class:`Polynomial`.

Opaque Python callables can be wrapped in :class:`BlackBox`; such weights
are only integrable by Monte Carlo.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import InputError, ParseError, UndeclaredVariableError
from .formula import (
    FALSE,
    TRUE,
    Atom,
    Formula,
    Universe,
    atoms,
    condition_on,
    evaluate_array,
    evaluate_skeleton,
    formula_to_json,
    interpret,
    parse_formula,
    parse_rational,
    rational_to_json,
)
from .polynomial import Polynomial


class WeightSpec:
    __slots__ = ()

    def children(self) -> tuple[WeightSpec, ...]:
        return ()

    # structure ---------------------------------------------------------------

    def is_polynomial(self) -> bool:
        """True when every piece is a polynomial (exact backend capable)."""
        return all(c.is_polynomial() for c in self.children())

    def conditions(self) -> list[Formula]:
        out = []
        for c in self.children():
            out.extend(c.conditions())
        return out

    def real_atoms(self) -> list[Atom]:
        seen = {}
        for cond in self.conditions():
            for a in atoms(cond):
                seen.setdefault(a, None)
        return list(seen)

    def degree(self) -> int:
        raise NotImplementedError

    def scaled(self, c) -> WeightSpec:
        return Mul((Const(Fraction(c)), self))

    # evaluation --------------------------------------------------------------

    def section(self, b: Sequence[bool]) -> WeightSpec:
        """``w_b``: the weight with the Boolean assignment ``b`` substituted."""
        raise NotImplementedError

    def evaluate(self, b: Sequence[bool], x: Sequence) -> Fraction:
        raise NotImplementedError

    def evaluate_array(self, X, b: Sequence[bool] = ()) -> np.ndarray:
        raise NotImplementedError

    def polynomial(self, nvars: int, truth: Callable[[Atom], bool],
                   b: Sequence[bool] = ()) -> Polynomial:
        """The single polynomial piece selected by atom truth values."""
        raise NotImplementedError


@dataclass(frozen=True)
class Const(WeightSpec):
    value: Fraction

    def degree(self):
        return 0

    def section(self, b):
        return self

    def evaluate(self, b, x):
        return self.value

    def evaluate_array(self, X, b=()):
        return np.full(np.asarray(X).shape[0], float(self.value))

    def polynomial(self, nvars, truth, b=()):
        return Polynomial.constant(self.value, nvars)


@dataclass(frozen=True)
class Var(WeightSpec):
    index: int
    name: str = ""

    def degree(self):
        return 1

    def section(self, b):
        return self

    def evaluate(self, b, x):
        return Fraction(x[self.index])

    def evaluate_array(self, X, b=()):
        return np.asarray(X, dtype=float)[:, self.index].copy()

    def polynomial(self, nvars, truth, b=()):
        return Polynomial.variable(self.index, nvars)


@dataclass(frozen=True)
class Add(WeightSpec):
    args: tuple[WeightSpec, ...]

    def children(self):
        return self.args

    def degree(self):
        return max(a.degree() for a in self.args)

    def section(self, b):
        return Add(tuple(a.section(b) for a in self.args))

    def evaluate(self, b, x):
        return sum((a.evaluate(b, x) for a in self.args), Fraction(0))

    def evaluate_array(self, X, b=()):
        out = self.args[0].evaluate_array(X, b)
        for a in self.args[1:]:
            out = out + a.evaluate_array(X, b)
        return out

    def polynomial(self, nvars, truth, b=()):
        acc = Polynomial.zero(nvars)
        for a in self.args:
            acc = acc + a.polynomial(nvars, truth, b)
        return acc


@dataclass(frozen=True)
class Mul(WeightSpec):
    args: tuple[WeightSpec, ...]

    def children(self):
        return self.args

    def degree(self):
        return sum(a.degree() for a in self.args)

    def section(self, b):
        return Mul(tuple(a.section(b) for a in self.args))

    def evaluate(self, b, x):
        acc = Fraction(1)
        for a in self.args:
            acc *= a.evaluate(b, x)
        return acc

    def evaluate_array(self, X, b=()):
        out = self.args[0].evaluate_array(X, b)
        for a in self.args[1:]:
            out = out * a.evaluate_array(X, b)
        return out

    def polynomial(self, nvars, truth, b=()):
        acc = Polynomial.constant(1, nvars)
        for a in self.args:
            acc = acc * a.polynomial(nvars, truth, b)
        return acc


@dataclass(frozen=True)
class Pow(WeightSpec):
    base: WeightSpec
    exponent: int

    def children(self):
        return (self.base,)

    def degree(self):
        return self.base.degree() * self.exponent

    def section(self, b):
        return Pow(self.base.section(b), self.exponent)

    def evaluate(self, b, x):
        return self.base.evaluate(b, x) ** self.exponent

    def evaluate_array(self, X, b=()):
        return self.base.evaluate_array(X, b) ** self.exponent

    def polynomial(self, nvars, truth, b=()):
        return self.base.polynomial(nvars, truth, b) ** self.exponent


@dataclass(frozen=True)
class Ite(WeightSpec):
    cond: Formula
    then: WeightSpec
    other: WeightSpec

    def children(self):
        return (self.then, self.other)

    def conditions(self):
        return [self.cond] + super().conditions()

    def degree(self):
        return max(self.then.degree(), self.other.degree())

    def section(self, b):
        c = condition_on(self.cond, b)
        if c == TRUE:
            return self.then.section(b)
        if c == FALSE:
            return self.other.section(b)
        return Ite(c, self.then.section(b), self.other.section(b))

    def evaluate(self, b, x):
        branch = self.then if interpret(self.cond, b, x) else self.other
        return branch.evaluate(b, x)

    def evaluate_array(self, X, b=()):
        mask = evaluate_array(self.cond, X, b)
        return np.where(mask, self.then.evaluate_array(X, b), self.other.evaluate_array(X, b))

    def polynomial(self, nvars, truth, b=()):
        known = {a: truth(a) for a in atoms(self.cond) if not a.expr.is_constant()}
        verdict = evaluate_skeleton(self.cond, b, known)
        if verdict is None:
            raise InputError(f"condition {self.cond!r} is not decided on this cell")
        branch = self.then if verdict else self.other
        return branch.polynomial(nvars, truth, b)


class BlackBox(WeightSpec):
    """Opaque non-negative density; Monte Carlo only.

    ``fn(b, X)`` must return one value per row of ``X``.
    """

    __slots__ = ("fn", "name")

    def __init__(self, fn: Callable[[tuple, np.ndarray], np.ndarray], name: str = "blackbox"):
        self.fn = fn
        self.name = name

    def __repr__(self):
        return f"BlackBox({self.name})"

    def is_polynomial(self):
        return False

    def degree(self):
        return 0

    def section(self, b):
        b = tuple(b)
        return _BoundBlackBox(self, b)

    def evaluate(self, b, x):
        return float(self.fn(tuple(b), np.asarray([x], dtype=float))[0])

    def evaluate_array(self, X, b=()):
        return np.asarray(self.fn(tuple(b), np.asarray(X, dtype=float)), dtype=float)

    def polynomial(self, nvars, truth, b=()):
        raise InputError("black-box weights have no polynomial form")


class _BoundBlackBox(BlackBox):
    __slots__ = ("parent", "bound")

    def __init__(self, parent: BlackBox, bound: tuple):
        super().__init__(parent.fn, parent.name)
        self.parent = parent
        self.bound = bound

    def evaluate(self, b, x):
        return self.parent.evaluate(self.bound, x)

    def evaluate_array(self, X, b=()):
        return self.parent.evaluate_array(X, self.bound)


# -- JSON ---------------------------------------------------------------------


def parse_weight(node, universe: Universe, path: str = "$") -> WeightSpec:
    """Weight expression: the arithmetic grammar plus ``ite``."""
    if not isinstance(node, dict):
        raise ParseError("weight must be an object", path)
    if "var" in node:
        name = node["var"]
        if name in universe.reals:
            return Var(universe.reals.index(name), name)
        if name in universe.booleans:
            raise ParseError(
                f"Boolean variable {name!r} used as a number; use ite", path
            )
        raise UndeclaredVariableError(f"undeclared variable {name!r}", path)
    if "const" in node:
        return Const(parse_rational(node["const"], path + ".const"))
    op = node.get("op")
    args = node.get("args")
    if op not in ("add", "mul", "pow", "neg", "ite"):
        raise ParseError(f"unknown weight operator {op!r}", path)
    if not isinstance(args, list) or not args:
        raise ParseError("'args' must be a non-empty list", path)
    if op == "ite":
        if len(args) != 3:
            raise ParseError("ite needs [condition, then, else]", path)
        return Ite(
            parse_formula(args[0], universe, path + ".args[0]"),
            parse_weight(args[1], universe, path + ".args[1]"),
            parse_weight(args[2], universe, path + ".args[2]"),
        )
    if op == "neg":
        if len(args) != 1:
            raise ParseError("neg takes one argument", path)
        return Mul((Const(Fraction(-1)), parse_weight(args[0], universe, path + ".args[0]")))
    if op == "pow":
        if len(args) != 2 or not isinstance(args[1], dict) or "const" not in args[1]:
            raise ParseError("pow needs [base, {const: k}]", path)
        k = parse_rational(args[1]["const"], path + ".args[1].const")
        if k.denominator != 1 or k < 0:
            raise ParseError("pow exponent must be a non-negative integer", path + ".args[1]")
        return Pow(parse_weight(args[0], universe, path + ".args[0]"), int(k))
    parts = tuple(parse_weight(a, universe, f"{path}.args[{i}]") for i, a in enumerate(args))
    if len(parts) == 1:
        return parts[0]
    return Add(parts) if op == "add" else Mul(parts)


def weight_to_json(w: WeightSpec, universe: Universe) -> dict:
    if isinstance(w, Const):
        return {"const": rational_to_json(w.value)}
    if isinstance(w, Var):
        return {"var": universe.reals[w.index]}
    if isinstance(w, (Add, Mul)):
        op = "add" if isinstance(w, Add) else "mul"
        return {"op": op, "args": [weight_to_json(a, universe) for a in w.args]}
    if isinstance(w, Pow):
        return {"op": "pow", "args": [weight_to_json(w.base, universe), {"const": w.exponent}]}
    if isinstance(w, Ite):
        return {"op": "ite", "args": [formula_to_json(w.cond, universe),
                                      weight_to_json(w.then, universe),
                                      weight_to_json(w.other, universe)]}
    raise InputError(f"{w!r} cannot be serialised")
