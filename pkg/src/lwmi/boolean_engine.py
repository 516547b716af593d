"""Boolean model enumeration, weighted model counting (WMC) and its
Lebesgue form (L-WMC) over the counting measure on ``B^M``."""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Iterator, Mapping, Sequence

from .errors import CapacityError, InputError, NegativeWeightError
from .formula import (
    FALSE,
    And,
    BoolVar,
    Formula,
    Not,
    interpret,
    is_propositional,
    substitute,
)
from .results import MeasureResult

ENUMERATION_CAP = 24
TABLE_CAP = 20


@dataclass(frozen=True)
class LiteralWeights:
    """``pairs[i] = (w(B_i), w(not B_i))``."""

    pairs: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        pairs = tuple((Fraction(p), Fraction(n)) for p, n in self.pairs)
        for i, (p, n) in enumerate(pairs):
            if p < 0 or n < 0:
                raise NegativeWeightError(f"literal weights of variable {i} must be non-negative")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_mapping(cls, names: Sequence[str], weights: Mapping[str, tuple]) -> LiteralWeights:
        missing = [n for n in names if n not in weights]
        if missing:
            raise InputError(f"no literal weights for {missing}")
        return cls(tuple(weights[n] for n in names))

    @property
    def M(self) -> int:
        return len(self.pairs)

    def weight(self, index: int, polarity: bool) -> Fraction:
        p, n = self.pairs[index]
        return p if polarity else n

    def is_probabilistic(self) -> bool:
        return all(p + n == 1 for p, n in self.pairs)


class AssignmentWeight:
    """A non-negative weight ``w: B^M -> Q``.

    Either a materialised table (only for ``M <= TABLE_CAP``) or the product
    form induced by literal weights.
    """

    def __init__(self, M: int, table: Mapping[tuple[bool, ...], Fraction] | None = None,
                 literals: LiteralWeights | None = None):
        if (table is None) == (literals is None):
            raise ValueError("give exactly one of table or literals")
        self.M = M
        self.literals = literals
        self._table = None
        if table is not None:
            if M > TABLE_CAP:
                raise CapacityError(f"weight tables are limited to M <= {TABLE_CAP}")
            full = {}
            for b in product((True, False), repeat=M):
                v = Fraction(table.get(b, 0))
                if v < 0:
                    raise NegativeWeightError(f"negative weight {v} at {b}")
                full[b] = v
            self._table = full

    @classmethod
    def from_function(cls, M: int, fn: Callable[[tuple[bool, ...]], object]) -> AssignmentWeight:
        if M > TABLE_CAP:
            raise CapacityError(f"weight tables are limited to M <= {TABLE_CAP}")
        return cls(M, table={b: fn(b) for b in product((True, False), repeat=M)})

    def __call__(self, b: Sequence[bool]) -> Fraction:
        b = tuple(bool(v) for v in b)
        if len(b) != self.M:
            raise InputError(f"assignment of length {len(b)} for M = {self.M}")
        if self._table is not None:
            return self._table[b]
        acc = Fraction(1)
        for i, v in enumerate(b):
            acc *= self.literals.weight(i, v)
        return acc

    def table(self) -> dict[tuple[bool, ...], Fraction]:
        if self._table is None:
            if self.M > TABLE_CAP:
                raise CapacityError(f"weight tables are limited to M <= {TABLE_CAP}")
            self._table = {b: self(b) for b in product((True, False), repeat=self.M)}
        return dict(self._table)


def _forced_literals(g: Formula) -> dict[int, bool]:
    """Unit literals of the top-level conjunction."""
    parts = g.children if isinstance(g, And) else (g,)
    forced = {}
    for c in parts:
        if isinstance(c, BoolVar):
            forced[c.index] = True
        elif isinstance(c, Not) and isinstance(c.child, BoolVar):
            forced[c.child.index] = False
    return forced


def enumerate_models(f: Formula, M: int, *, cap: int = ENUMERATION_CAP) -> Iterator[tuple[bool, ...]]:
    """Yield the (partial) models of ``f`` in lexicographic order, true first.

    For a propositional ``f`` these are exactly its models.  When ``f`` has
    real atoms, an assignment is yielded whenever the conditioned formula is
    not syntactically ``False``; its real region may still turn out empty.
    """
    if M > cap:
        raise CapacityError(f"{M} Boolean variables exceeds the enumeration cap of {cap}")
    prefix: list[bool] = []

    def search(g: Formula, i: int):
        if g == FALSE:
            return
        if i == M:
            yield tuple(prefix)
            return
        forced = _forced_literals(g)
        for value in ((forced[i],) if i in forced else (True, False)):
            prefix.append(value)
            yield from search(substitute(g, {i: value}), i + 1)
            prefix.pop()

    yield from search(substitute(f, {}), 0)


def _require_propositional(f: Formula):
    if not is_propositional(f):
        raise InputError("formula has real atoms; use the WMI engine")


def wmc(f: Formula, lw: LiteralWeights, *, cap: int = ENUMERATION_CAP) -> MeasureResult:
    """Sum over models of the product of their literal weights."""
    _require_propositional(f)
    start = time.perf_counter()
    breakdown = {}
    for b in enumerate_models(f, lw.M, cap=cap):
        acc = Fraction(1)
        for i, v in enumerate(b):
            acc *= lw.weight(i, v)
        breakdown[b] = acc
    value = sum(breakdown.values(), Fraction(0))
    return MeasureResult(value, "exact", breakdown=breakdown,
                         elapsed=time.perf_counter() - start, definition="WMC")


def lwmc(f: Formula, w: AssignmentWeight, *, cap: int = ENUMERATION_CAP) -> MeasureResult:
    """Integral of the simple function ``w * 1_M(f)`` against counting measure.

    Iterates over all of ``B^M`` (the support of the simple function) rather
    than over enumerated models, so it is an independent route to
    :func:`wmc`.
    """
    _require_propositional(f)
    if w.M > cap:
        raise CapacityError(f"{w.M} Boolean variables exceeds the enumeration cap of {cap}")
    start = time.perf_counter()
    breakdown = {}
    for b in product((True, False), repeat=w.M):
        # mu(M(f) & {b}) is 1 or 0
        measure = 1 if interpret(f, b) else 0
        if measure:
            breakdown[b] = w(b) * measure
    value = sum(breakdown.values(), Fraction(0))
    return MeasureResult(value, "exact", breakdown=breakdown,
                         elapsed=time.perf_counter() - start, definition="L-WMC")


def lift_literal_weights(lw: LiteralWeights) -> AssignmentWeight:
    """``w(b) = prod_i ite(b_i, w(B_i), w(not B_i))``."""
    return AssignmentWeight(lw.M, literals=lw)
