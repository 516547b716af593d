"""Sparse multivariate polynomials over the rationals and their exact
integration over simplices and polytopes."""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import BackendUnavailableError
from .geometry import Polytope, Simplex, triangulate

DEGREE_CAP = 8

Exponents = tuple[int, ...]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        # exact binary value; callers wanting decimals should pass strings
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def _term_key(item):
    exps, _ = item
    return (-sum(exps), tuple(-e for e in exps))


class Polynomial:
    """Immutable sparse polynomial in ``nvars`` variables.

    Terms are stored as a mapping from exponent tuples to non-zero
    :class:`~fractions.Fraction` coefficients, in graded-lex order so that
    equal polynomials compare and hash equal.
    """

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponents, object] | Iterable = ()):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exponents, Fraction] = {}
        for exps, coef in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise ValueError(f"exponent vector {exps} does not have length {nvars}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            acc[exps] = acc.get(exps, Fraction(0)) + _as_fraction(coef)
        self.nvars = nvars
        self._terms = dict(sorted(((e, c) for e, c in acc.items() if c != 0), key=_term_key))
        self._hash = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, value, nvars: int) -> Polynomial:
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def zero(cls, nvars: int) -> Polynomial:
        return cls(nvars)

    @classmethod
    def variable(cls, index: int, nvars: int) -> Polynomial:
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for {nvars} variables")
        exps = [0] * nvars
        exps[index] = 1
        return cls(nvars, {tuple(exps): 1})

    @classmethod
    def affine(cls, coeffs: Sequence, const=0) -> Polynomial:
        """``sum(coeffs[i] * x_i) + const``."""
        n = len(coeffs)
        terms = {(0,) * n: const}
        for i, a in enumerate(coeffs):
            exps = [0] * n
            exps[i] = 1
            terms[tuple(exps)] = a
        return cls(n, terms)

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> dict[Exponents, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        return max((sum(e) for e in self._terms), default=-1)

    def is_constant(self) -> bool:
        return self.degree() <= 0

    def constant_value(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def is_linear(self) -> bool:
        return self.degree() <= 1

    def linear_part(self) -> tuple[tuple[Fraction, ...], Fraction]:
        """Return ``(a, c)`` with ``p(x) = a.x + c``; requires degree <= 1."""
        if not self.is_linear():
            raise ValueError("polynomial is not affine")
        a = [Fraction(0)] * self.nvars
        for exps, coef in self._terms.items():
            if sum(exps) == 1:
                a[exps.index(1)] = coef
        return tuple(a), self.constant_value()

    def variables(self) -> set[int]:
        return {i for exps in self._terms for i, e in enumerate(exps) if e}

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError(f"dimension mismatch: {self.nvars} vs {other.nvars}")
            return other
        return Polynomial.constant(other, self.nvars)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self._terms)
        for exps, coef in other._terms.items():
            terms[exps] = terms.get(exps, 0) + coef
        return Polynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = _as_fraction(other)
            return Polynomial(self.nvars, {e: c * v for e, v in self._terms.items()})
        other = self._coerce(other)
        terms: dict[Exponents, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Polynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.constant(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, tuple(self._terms.items())))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "Polynomial(0)"
        parts = []
        for exps, coef in self._terms.items():
            mono = "*".join(
                f"x{i}" if e == 1 else f"x{i}^{e}" for i, e in enumerate(exps) if e
            )
            parts.append(f"{coef}*{mono}" if mono else f"{coef}")
        return f"Polynomial({' + '.join(parts)})"

    # -- evaluation / substitution ---------------------------------------

    def __call__(self, point: Sequence) -> Fraction:
        return poly_eval(self, point)

    def compose(self, substitutions: Sequence[Polynomial]) -> Polynomial:
        """Substitute ``x_i := substitutions[i]`` (all over a common ring)."""
        if len(substitutions) != self.nvars:
            raise ValueError("need one substitution per variable")
        if self.nvars == 0:
            target = 0
        else:
            target = substitutions[0].nvars
        powers: list[dict[int, Polynomial]] = [
            {0: Polynomial.constant(1, target), 1: s} for s in substitutions
        ]

        def power(i, e):
            cache = powers[i]
            if e not in cache:
                cache[e] = power(i, e - 1) * substitutions[i]
            return cache[e]

        result = Polynomial.zero(target)
        for exps, coef in self._terms.items():
            term = Polynomial.constant(coef, target)
            for i, e in enumerate(exps):
                if e:
                    term = term * power(i, e)
            result = result + term
        return result

    def with_nvars(self, nvars: int, index_map: Sequence[int]) -> Polynomial:
        """Re-embed into ``nvars`` variables, variable i going to ``index_map[i]``."""
        terms = {}
        for exps, coef in self._terms.items():
            new = [0] * nvars
            for i, e in enumerate(exps):
                new[index_map[i]] += e
            terms[tuple(new)] = coef
        return Polynomial(nvars, terms)


def poly_eval(p: Polynomial, x: Sequence) -> Fraction:
    """Evaluate ``p`` at ``x`` exactly by nested Horner in each variable.

    Fraction coordinates give an exact result; floats are converted exactly.
    """
    if len(x) != p.nvars:
        raise ValueError(f"point has {len(x)} coordinates, polynomial has {p.nvars} variables")
    point = [_as_fraction(v) for v in x]
    return _horner(list(p.items()), point, 0)


def _horner(terms, point, var) -> Fraction:
    if not terms:
        return Fraction(0)
    if var == len(point):
        return sum((c for _, c in terms), Fraction(0))
    groups: dict[int, list] = {}
    for exps, coef in terms:
        groups.setdefault(exps[var], []).append((exps, coef))
    top = max(groups)
    acc = Fraction(0)
    for k in range(top, -1, -1):
        acc = acc * point[var]
        if k in groups:
            acc += _horner(groups[k], point, var + 1)
    return acc


# -- exact integration ------------------------------------------------------


def dirichlet_standard_simplex(exponents: Sequence[int]) -> Fraction:
    """Integral of ``prod(l_i ** a_i)`` over ``{l >= 0, sum(l) <= 1}``."""
    n = len(exponents)
    num = 1
    for a in exponents:
        num *= factorial(a)
    return Fraction(num, factorial(n + sum(exponents)))


def _affine_map(s: Simplex) -> list[Polynomial]:
    v0 = s.vertices[0]
    n = s.dim
    return [
        Polynomial.affine([s.vertices[i + 1][j] - v0[j] for i in range(n)], v0[j])
        for j in range(n)
    ]


def integrate_poly_simplex(p: Polynomial, s: Simplex) -> Fraction:
    """Exact integral of ``p`` over ``s``; degenerate simplices give 0."""
    if p.nvars != s.dim:
        raise ValueError("polynomial and simplex dimensions differ")
    jac = abs(s.edge_determinant())
    if jac == 0 or p.is_zero():
        return Fraction(0)
    pulled = p.compose(_affine_map(s))
    total = sum(
        (coef * dirichlet_standard_simplex(exps) for exps, coef in pulled.items()),
        Fraction(0),
    )
    return jac * total


def integrate_monomial_simplex(exponents: Sequence[int], s: Simplex) -> Fraction:
    """Exact integral of the monomial ``x ** exponents`` over ``s``."""
    if len(exponents) != s.dim:
        raise ValueError("exponent vector and simplex dimensions differ")
    return integrate_poly_simplex(Polynomial(s.dim, {tuple(exponents): 1}), s)


def integrate_poly_polytope(p: Polynomial, q: Polytope, *, degree_cap: int = DEGREE_CAP,
                            dimension_cap: int | None = None) -> Fraction:
    """Exact integral of ``p`` over the polytope ``q``.

    Raises :class:`BackendUnavailableError` when the degree exceeds
    ``degree_cap`` or the dimension exceeds the triangulation cap; callers
    then fall back to Monte Carlo.
    """
    if p.nvars != q.dim:
        raise ValueError("polynomial and polytope dimensions differ")
    if p.degree() > degree_cap:
        raise BackendUnavailableError(
            f"polynomial degree {p.degree()} exceeds exact cap {degree_cap}"
        )
    if p.is_zero():
        return Fraction(0)
    kwargs = {} if dimension_cap is None else {"dimension_cap": dimension_cap}
    simplices = triangulate(q, **kwargs)
    return sum((integrate_poly_simplex(p, s) for s in simplices), Fraction(0))


def poly_eval_array(p: Polynomial, X):
    """Float evaluation of ``p`` at each row of the ``(n, nvars)`` array ``X``."""
    X = np.asarray(X, dtype=float)
    out = np.zeros(X.shape[0])
    for exps, coef in p.items():
        term = np.full(X.shape[0], float(coef))
        for i, e in enumerate(exps):
            if e:
                term = term * X[:, i] ** e
        out += term
    return out
