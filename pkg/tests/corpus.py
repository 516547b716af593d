"""Seeded random problem generators shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

from lwmi.formula import FALSE, TRUE, And, Atom, BoolVar, Not, Or, Universe
from lwmi.geometry import Halfspace, Polytope
from lwmi.polynomial import Polynomial
from lwmi.weights import Add, Const, Ite, Mul, Pow, Var
from lwmi.wmi import Problem


def rational(rng: random.Random, lo=0, hi=3, den=4) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), rng.randint(1, den))


def random_tree(rng: random.Random, leaves, depth: int):
    if depth == 0 or rng.random() < 0.25:
        leaf = rng.choice(leaves)
        return Not(leaf) if rng.random() < 0.3 else leaf
    kind = rng.choice((And, Or, Not))
    if kind is Not:
        return Not(random_tree(rng, leaves, depth - 1))
    return kind(tuple(random_tree(rng, leaves, depth - 1) for _ in range(rng.randint(2, 3))))


def random_propositional(rng: random.Random, M: int, depth: int = 4):
    leaves = [BoolVar(i, f"B{i}") for i in range(M)]
    return random_tree(rng, leaves, depth)


def random_literal_pairs(rng: random.Random, M: int):
    return tuple((rational(rng), rational(rng)) for _ in range(M))


def literal_weight_spec(pairs):
    """``prod_i ite(B_i, p_i, n_i)`` as a weight tree."""
    factors = tuple(Ite(BoolVar(i, f"B{i}"), Const(p), Const(n)) for i, (p, n) in enumerate(pairs))
    if not factors:
        return Const(Fraction(1))
    return factors[0] if len(factors) == 1 else Mul(factors)


def random_linear_atom(rng: random.Random, N: int, bounds) -> Atom:
    while True:
        a = [Fraction(rng.randint(-3, 3)) for _ in range(N)]
        if any(a):
            break
    # pass through a random point of the box so the atom actually cuts it
    point = [lo + (hi - lo) * Fraction(rng.randint(1, 7), 8) for lo, hi in bounds]
    c = -sum(ai * pi for ai, pi in zip(a, point))
    return Atom(Polynomial.affine(a, c))


def random_box(rng: random.Random, N: int):
    out = []
    for _ in range(N):
        lo = Fraction(rng.randint(-4, 1), 2)
        out.append((lo, lo + Fraction(rng.randint(1, 4), 2)))
    return tuple(out)


def random_nonneg_poly(rng: random.Random, N: int, bounds, degree: int):
    """Non-negative on the box: non-negative combination of powers of
    ``x_i - lo_i`` and ``hi_i - x_i``."""
    parts = [Const(rational(rng, 0, 2))]
    for _ in range(rng.randint(1, 3)):
        i = rng.randrange(N)
        lo, hi = bounds[i]
        shifted = (Add((Var(i, f"x{i}"), Const(-lo))) if rng.random() < 0.5
                   else Add((Const(hi), Mul((Const(Fraction(-1)), Var(i, f"x{i}"))))))
        e = rng.randint(1, degree)
        term = Pow(shifted, e) if e > 1 else shifted
        parts.append(Mul((Const(rational(rng, 0, 2)), term)))
    return Add(tuple(parts))


def random_lra_problem(rng: random.Random, *, max_M=4, max_N=2, max_atoms=6, degree=3,
                       backend="auto") -> Problem:
    """A random SMT(LRA) problem with a non-negative piecewise polynomial weight."""
    M = rng.randint(0, max_M)
    N = rng.randint(1, max_N)
    bounds = random_box(rng, N)
    universe = Universe(tuple(f"B{i}" for i in range(M)), tuple(f"x{i}" for i in range(N)), bounds)
    n_atoms = rng.randint(1, max_atoms)
    weight_atoms = rng.randint(0, min(2, n_atoms - 1)) if n_atoms > 1 else 0
    atom_pool = [random_linear_atom(rng, N, bounds) for _ in range(n_atoms)]
    formula_atoms = atom_pool[:n_atoms - weight_atoms]
    leaves = formula_atoms + [BoolVar(i, f"B{i}") for i in range(M)]
    formula = random_tree(rng, leaves, 3)
    weight = random_nonneg_poly(rng, N, bounds, degree)
    for atom in atom_pool[n_atoms - weight_atoms:]:
        weight = Ite(atom, weight, random_nonneg_poly(rng, N, bounds, degree))
    if M and rng.random() < 0.7:
        b = BoolVar(rng.randrange(M))
        weight = Ite(b, weight, random_nonneg_poly(rng, N, bounds, degree))
    return Problem(universe, formula, weight, backend=backend)


def random_query(rng: random.Random, universe: Universe, n_atoms: int = 3):
    leaves = [BoolVar(i, f"B{i}") for i in range(universe.M)]
    leaves += [random_linear_atom(rng, universe.N, universe.bounds) for _ in range(n_atoms)]
    return random_tree(rng, leaves, 3)


# -- PDF fixtures ----------------------------------------------------------------


def _box_integral_of_shifted_power(lo, hi, e):
    # int_lo^hi (x - lo)^e dx
    return (hi - lo) ** (e + 1) / (e + 1)


def pdf_fixture(rng: random.Random):
    """A mixture of per-assignment polynomial densities on boxes.

    Returns ``(universe, weight, marginal)`` where ``marginal[b]`` is the
    intended Boolean marginal.  Some assignments get zero mass, and some
    densities are supported on half of the first axis only.
    """
    M = rng.randint(1, 3)
    N = rng.randint(1, 2)
    bounds = random_box(rng, N)
    universe = Universe(tuple(f"B{i}" for i in range(M)), tuple(f"x{i}" for i in range(N)), bounds)
    assignments = list(product((True, False), repeat=M))
    raw = {b: (0 if rng.random() < 0.25 else rng.randint(1, 5)) for b in assignments}
    if not any(raw.values()):
        raw[assignments[0]] = 1
    total = sum(raw.values())
    marginal = {b: Fraction(v, total) for b, v in raw.items()}

    def density(b):
        if marginal[b] == 0:
            return Const(Fraction(0))
        i = rng.randrange(N)
        e = rng.randint(0, 3)
        lo, hi = bounds[i]
        half = rng.random() < 0.4
        top = (lo + hi) / 2 if half else hi
        mass = _box_integral_of_shifted_power(lo, top, e)
        for j, (l2, h2) in enumerate(bounds):
            if j != i:
                mass *= h2 - l2
        base = Pow(Add((Var(i, f"x{i}"), Const(-lo))), e) if e else Const(Fraction(1))
        body = Mul((Const(marginal[b] / mass), base))
        if half:
            cut = Atom(Polynomial.affine([1 if j == i else 0 for j in range(N)], -top))
            return Ite(cut, body, Const(Fraction(0)))
        return body

    def tree(prefix):
        if len(prefix) == M:
            return density(prefix)
        return Ite(BoolVar(len(prefix), f"B{len(prefix)}"), tree(prefix + (True,)),
                   tree(prefix + (False,)))

    return universe, tree(()), marginal


# -- polytopes ----------------------------------------------------------------------


def random_polytope(rng: random.Random, dim: int, cuts: int = 3) -> Polytope:
    """A box cut by random halfspaces through interior points."""
    bounds = [(Fraction(rng.randint(-3, 0)), Fraction(rng.randint(1, 3))) for _ in range(dim)]
    p = Polytope.box(bounds)
    extra = []
    for _ in range(cuts):
        atom = random_linear_atom(rng, dim, bounds)
        a, c = atom.expr.linear_part()
        extra.append(Halfspace(a, -c) if rng.random() < 0.5 else Halfspace(a, -c).complement())
    return p.intersect(extra)


__all__ = [
    "FALSE",
    "TRUE",
    "literal_weight_spec",
    "pdf_fixture",
    "random_literal_pairs",
    "random_lra_problem",
    "random_polytope",
    "random_propositional",
    "random_query",
]
