"""Propositional and SMT formulas: AST, JSON parsing/serialization,
interpretation and Boolean conditioning.

Real arithmetic atoms are kept in the single canonical form ``expr <= 0``
where ``expr`` is a :class:`~lwmi.polynomial.Polynomial` over the real
variables of the :class:`Universe`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import InputError, ParseError, UndeclaredVariableError
from .polynomial import Polynomial, poly_eval, poly_eval_array

Assignment = tuple[bool, ...]
RealPoint = tuple


@dataclass(frozen=True)
class Universe:
    """Ordered Boolean names and ordered, boxed real names."""

    booleans: tuple[str, ...] = ()
    reals: tuple[str, ...] = ()
    bounds: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "booleans", tuple(self.booleans))
        object.__setattr__(self, "reals", tuple(self.reals))
        bounds = tuple((Fraction(lo), Fraction(hi)) for lo, hi in self.bounds)
        object.__setattr__(self, "bounds", bounds)
        names = self.booleans + self.reals
        if len(set(names)) != len(names):
            raise InputError("variable names must be unique across booleans and reals")
        if len(bounds) != len(self.reals):
            raise InputError("every real variable needs (lower, upper) bounds")
        for name, (lo, hi) in zip(self.reals, bounds):
            if not lo < hi:
                raise InputError(f"bounds of {name!r} must satisfy lower < upper")

    @property
    def M(self) -> int:
        return len(self.booleans)

    @property
    def N(self) -> int:
        return len(self.reals)

    def box_volume(self) -> Fraction:
        vol = Fraction(1)
        for lo, hi in self.bounds:
            vol *= hi - lo
        return vol

    def real_only(self) -> Universe:
        return Universe((), self.reals, self.bounds)


# -- AST ---------------------------------------------------------------------


class Formula:
    """Base class of formula nodes.  Nodes are immutable and hashable."""

    __slots__ = ()

    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self):
        return "True"


@dataclass(frozen=True, repr=False)
class Bottom(Formula):
    def __repr__(self):
        return "False"


TRUE = Top()
FALSE = Bottom()


@dataclass(frozen=True)
class BoolVar(Formula):
    index: int
    name: str = ""

    def __repr__(self):
        return self.name or f"B{self.index}"


@dataclass(frozen=True)
class Atom(Formula):
    """The real arithmetic proposition ``expr <= 0``."""

    expr: Polynomial

    def __repr__(self):
        return f"({self.expr!r} <= 0)"


@dataclass(frozen=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True)
class And(Formula):
    children: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    children: tuple[Formula, ...]


def _flatten(kind, args):
    out = []
    for a in args:
        if isinstance(a, kind):
            out.extend(a.children)
        else:
            out.append(a)
    return tuple(out)


def conj(*args: Formula) -> Formula:
    """n-ary conjunction, flattened but not simplified."""
    return And(_flatten(And, args))


def disj(*args: Formula) -> Formula:
    return Or(_flatten(Or, args))


def le(lhs: Polynomial, rhs=0) -> Atom:
    return Atom(lhs - rhs)


def ge(lhs: Polynomial, rhs=0) -> Atom:
    return Atom(rhs - lhs)


# -- simplification by constant absorption -------------------------------------


def _mk_not(f: Formula) -> Formula:
    if f == TRUE:
        return FALSE
    if f == FALSE:
        return TRUE
    return Not(f)


def _mk_nary(kind, children: Sequence[Formula]) -> Formula:
    unit, zero = (TRUE, FALSE) if kind is And else (FALSE, TRUE)
    out = []
    for c in _flatten(kind, children):
        if c == zero:
            return zero
        if c != unit:
            out.append(c)
    if not out:
        return unit
    if len(out) == 1:
        return out[0]
    return kind(tuple(out))


def substitute(f: Formula, values: Mapping[int, bool]) -> Formula:
    """Replace Boolean variables by constants and absorb.

    Constant atoms (no real variable left) are folded to ``TRUE``/``FALSE``.
    """
    if isinstance(f, BoolVar):
        if f.index in values:
            return TRUE if values[f.index] else FALSE
        return f
    if isinstance(f, Atom):
        if f.expr.is_constant():
            return TRUE if f.expr.constant_value() <= 0 else FALSE
        return f
    if isinstance(f, Not):
        return _mk_not(substitute(f.child, values))
    if isinstance(f, (And, Or)):
        return _mk_nary(type(f), [substitute(c, values) for c in f.children])
    return f


def simplify(f: Formula) -> Formula:
    """Constant absorption only."""
    return substitute(f, {})


def condition_on(f: Formula, b: Sequence[bool]) -> Formula:
    """Real-only formula whose models are the real points extending ``b``."""
    return substitute(f, dict(enumerate(b)))


# -- queries -----------------------------------------------------------------


def walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Not):
            stack.append(node.child)
        elif isinstance(node, (And, Or)):
            stack.extend(reversed(node.children))


def atoms(f: Formula) -> list[Atom]:
    """Distinct atoms in order of first appearance."""
    seen = {}
    for node in walk(f):
        if isinstance(node, Atom):
            seen.setdefault(node, None)
    return list(seen)


def bool_vars(f: Formula) -> set[int]:
    return {node.index for node in walk(f) if isinstance(node, BoolVar)}


def is_propositional(f: Formula) -> bool:
    return not any(isinstance(node, Atom) for node in walk(f))


def is_linear(f: Formula) -> bool:
    return all(a.expr.is_linear() for a in atoms(f))


def interpret(f: Formula, ib: Sequence[bool], ix: Sequence = ()) -> bool:
    """Truth value of ``f`` under the total interpretation ``(ib, ix)``."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, BoolVar):
        if f.index >= len(ib):
            raise InputError(f"Boolean assignment of length {len(ib)} does not cover {f!r}")
        return bool(ib[f.index])
    if isinstance(f, Atom):
        return poly_eval(f.expr, ix) <= 0
    if isinstance(f, Not):
        return not interpret(f.child, ib, ix)
    if isinstance(f, And):
        return all(interpret(c, ib, ix) for c in f.children)
    if isinstance(f, Or):
        return any(interpret(c, ib, ix) for c in f.children)
    raise TypeError(f"not a formula: {f!r}")


def evaluate_skeleton(f: Formula, ib: Sequence[bool] | Mapping[int, bool],
                      atom_values: Mapping[Atom, bool]) -> bool | None:
    """Three-valued evaluation with atoms replaced by given truth values.

    Unknown Boolean variables or atoms make the result ``None`` unless the
    connectives decide it anyway.
    """
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, BoolVar):
        if isinstance(ib, Mapping):
            return ib.get(f.index)
        return bool(ib[f.index]) if f.index < len(ib) else None
    if isinstance(f, Atom):
        if f.expr.is_constant():
            return f.expr.constant_value() <= 0
        return atom_values.get(f)
    if isinstance(f, Not):
        v = evaluate_skeleton(f.child, ib, atom_values)
        return None if v is None else not v
    if isinstance(f, (And, Or)):
        decisive = isinstance(f, Or)
        unknown = False
        for c in f.children:
            v = evaluate_skeleton(c, ib, atom_values)
            if v is None:
                unknown = True
            elif v is decisive:
                return decisive
        return None if unknown else not decisive
    raise TypeError(f"not a formula: {f!r}")


def evaluate_array(f: Formula, X, ib: Sequence[bool] = ()) -> np.ndarray:
    """Vectorised interpretation at each row of ``X`` (float arithmetic)."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if isinstance(f, Top):
        return np.ones(n, dtype=bool)
    if isinstance(f, Bottom):
        return np.zeros(n, dtype=bool)
    if isinstance(f, BoolVar):
        return np.full(n, bool(ib[f.index]))
    if isinstance(f, Atom):
        return poly_eval_array(f.expr, X) <= 0
    if isinstance(f, Not):
        return ~evaluate_array(f.child, X, ib)
    if isinstance(f, And):
        out = np.ones(n, dtype=bool)
        for c in f.children:
            out &= evaluate_array(c, X, ib)
        return out
    if isinstance(f, Or):
        out = np.zeros(n, dtype=bool)
        for c in f.children:
            out |= evaluate_array(c, X, ib)
        return out
    raise TypeError(f"not a formula: {f!r}")


# -- JSON grammar ------------------------------------------------------------

_ARITH_OPS = {"add", "mul", "pow", "neg"}
_ATOM_OPS = {"le", "lt", "ge", "gt"}
_LOGIC_OPS = {"and", "or", "not", "true", "false"}


def parse_rational(value, path: str = "$") -> Fraction:
    """Exact rational from an int, a decimal/fraction string, or a Fraction.

    Floats are only accepted when JSON was decoded with ``parse_float=Fraction``
    upstream; a genuine binary float is converted through its shortest repr so
    that ``0.1`` becomes ``1/10``.
    """
    if isinstance(value, bool):
        raise ParseError("booleans are not numbers", path)
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ParseError("constants must be finite", path)
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"invalid rational constant {value!r}", path) from exc
    raise ParseError(f"invalid constant {value!r}", path)


def loads(text: str):
    """Decode JSON keeping every decimal literal exact."""
    try:
        return json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.pos) from exc


def _expect_args(node, path, count=None):
    args = node.get("args")
    if not isinstance(args, list):
        raise ParseError("'args' must be a list", path)
    if count is not None and len(args) != count:
        raise ParseError(f"expected {count} argument(s), got {len(args)}", path)
    return args


def parse_expression(node, universe: Universe, path: str = "$") -> Polynomial:
    """Arithmetic expression over the real variables of ``universe``."""
    n = universe.N
    if not isinstance(node, dict):
        raise ParseError("expression must be an object", path)
    if "var" in node:
        name = node["var"]
        if name in universe.reals:
            return Polynomial.variable(universe.reals.index(name), n)
        if name in universe.booleans:
            raise ParseError(f"Boolean variable {name!r} used in arithmetic", path)
        raise UndeclaredVariableError(f"undeclared variable {name!r}", path)
    if "const" in node:
        return Polynomial.constant(parse_rational(node["const"], path + ".const"), n)
    op = node.get("op")
    if op not in _ARITH_OPS:
        raise ParseError(f"unknown arithmetic operator {op!r}", path)
    if op == "neg":
        (arg,) = _expect_args(node, path, 1)
        return -parse_expression(arg, universe, path + ".args[0]")
    if op == "pow":
        base, exp = _expect_args(node, path, 2)
        if not isinstance(exp, dict) or "const" not in exp:
            raise ParseError("pow exponent must be a constant", path + ".args[1]")
        k = parse_rational(exp["const"], path + ".args[1].const")
        if k.denominator != 1 or k < 0:
            raise ParseError("pow exponent must be a non-negative integer", path + ".args[1]")
        return parse_expression(base, universe, path + ".args[0]") ** int(k)
    args = _expect_args(node, path)
    if not args:
        raise ParseError(f"'{op}' needs at least one argument", path)
    parts = [parse_expression(a, universe, f"{path}.args[{i}]") for i, a in enumerate(args)]
    acc = parts[0]
    for p in parts[1:]:
        acc = acc + p if op == "add" else acc * p
    return acc


def parse_formula(node, universe: Universe, path: str = "$") -> Formula:
    """Parse a JSON formula (already decoded, or as text).

    ``lt``/``gt`` are normalised to their closures, ``ge``/``gt`` by negating
    the difference, so every atom reads ``lhs - rhs <= 0``.  Equality atoms
    are rejected.
    """
    if isinstance(node, str):
        node = loads(node)
    if not isinstance(node, dict):
        raise ParseError("formula must be an object", path)
    if "var" in node:
        name = node["var"]
        if name in universe.booleans:
            return BoolVar(universe.booleans.index(name), name)
        if name in universe.reals:
            raise ParseError(f"real variable {name!r} used as a formula", path)
        raise UndeclaredVariableError(f"undeclared variable {name!r}", path)
    if "const" in node:
        raise ParseError("a constant is not a formula", path)
    op = node.get("op")
    if op in ("eq", "ne", "="):
        raise ParseError(
            "equality atoms are not supported: they denote measure-zero sets", path
        )
    if op in _ATOM_OPS:
        for key in ("lhs", "rhs"):
            if key not in node:
                raise ParseError(f"atom is missing '{key}'", path)
        lhs = parse_expression(node["lhs"], universe, path + ".lhs")
        rhs = parse_expression(node["rhs"], universe, path + ".rhs")
        return Atom(lhs - rhs) if op in ("le", "lt") else Atom(rhs - lhs)
    if op == "true":
        return TRUE
    if op == "false":
        return FALSE
    if op == "not":
        (arg,) = _expect_args(node, path, 1)
        return Not(parse_formula(arg, universe, path + ".args[0]"))
    if op in ("and", "or"):
        args = _expect_args(node, path)
        children = [parse_formula(a, universe, f"{path}.args[{i}]") for i, a in enumerate(args)]
        return conj(*children) if op == "and" else disj(*children)
    if op in _ARITH_OPS:
        raise ParseError(f"arithmetic '{op}' used where a formula is expected", path)
    raise ParseError(f"unknown operator {op!r}", path)


def rational_to_json(q: Fraction) -> str:
    return str(Fraction(q))


def expression_to_json(p: Polynomial, universe: Universe) -> dict:
    terms = []
    for exps, coef in p.items():
        factors = []
        for i, e in enumerate(exps):
            if e == 1:
                factors.append({"var": universe.reals[i]})
            elif e > 1:
                factors.append({"op": "pow", "args": [{"var": universe.reals[i]}, {"const": e}]})
        if coef != 1 or not factors:
            factors.insert(0, {"const": rational_to_json(coef)})
        terms.append(factors[0] if len(factors) == 1 else {"op": "mul", "args": factors})
    if not terms:
        return {"const": "0"}
    return terms[0] if len(terms) == 1 else {"op": "add", "args": terms}


def formula_to_json(f: Formula, universe: Universe) -> dict:
    """Serialise to the JSON grammar; atoms always come out as ``le ... 0``."""
    if isinstance(f, Top):
        return {"op": "true"}
    if isinstance(f, Bottom):
        return {"op": "false"}
    if isinstance(f, BoolVar):
        return {"var": universe.booleans[f.index]}
    if isinstance(f, Atom):
        return {"op": "le", "lhs": expression_to_json(f.expr, universe), "rhs": {"const": "0"}}
    if isinstance(f, Not):
        return {"op": "not", "args": [formula_to_json(f.child, universe)]}
    if isinstance(f, (And, Or)):
        op = "and" if isinstance(f, And) else "or"
        return {"op": op, "args": [formula_to_json(c, universe) for c in f.children]}
    raise TypeError(f"not a formula: {f!r}")


def dumps_formula(f: Formula, universe: Universe) -> str:
    return json.dumps(formula_to_json(f, universe), sort_keys=True, separators=(",", ":"))
