"""Weighted model integration over ``B^M x R^N``.

The integral of ``w * 1_M(phi)`` against counting x Lebesgue measure is
computed in iterated form: an outer sum over Boolean assignments ``b``
and, for each, an inner Lebesgue integral of the weight section ``w_b``
over the real region of ``phi`` conditioned on ``b``.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .boolean_engine import (
    AssignmentWeight,
    LiteralWeights,
    enumerate_models,
    lift_literal_weights,
    lwmc,
    wmc,
)
from .errors import BackendUnavailableError, InputError, ParseError
from .formula import (
    FALSE,
    TRUE,
    BoolVar,
    Formula,
    Not,
    Universe,
    atoms,
    condition_on,
    evaluate_array,
    evaluate_skeleton,
    formula_to_json,
    is_propositional,
    loads,
    parse_formula,
    parse_rational,
    simplify,
)
from .geometry import TRIANGULATION_DIM_CAP
from .montecarlo import mc_integrate
from .polynomial import DEGREE_CAP, integrate_poly_polytope
from .region import ATOM_CAP, canonical_atom, decompose
from .results import MeasureResult, number_to_json
from .weights import Const, Ite, Mul, WeightSpec, parse_weight, weight_to_json

log = logging.getLogger(__name__)

BACKENDS = ("exact", "mc", "auto")
QUERIES = ("wmi", "wmc", "validate-pdf", "factorize", "check-identities")


@dataclass
class Problem:
    """A weighted model integration query ``(phi, w | B, X)``."""

    universe: Universe
    formula: Formula
    weight: WeightSpec = field(default_factory=lambda: Const(Fraction(1)))
    query: str = "wmi"
    backend: str = "auto"
    mc_samples: int = 100_000
    seed: int = 0
    oracle_resolution: int = 1000
    threads: int | None = None

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise InputError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.query not in QUERIES:
            raise InputError(f"query must be one of {QUERIES}, got {self.query!r}")
        if self.query == "wmc" and self.universe.N:
            raise InputError("a wmc query needs a universe without real variables")

    @classmethod
    def from_json(cls, doc) -> Problem:
        if isinstance(doc, str):
            doc = loads(doc)
        if not isinstance(doc, dict):
            raise ParseError("problem must be a JSON object", "$")
        for key in ("formula",):
            if key not in doc:
                raise ParseError(f"missing key {key!r}", "$")
        booleans = doc.get("booleans", [])
        reals = doc.get("reals", [])
        if not isinstance(booleans, list) or not all(isinstance(b, str) for b in booleans):
            raise ParseError("'booleans' must be a list of names", "$.booleans")
        if not isinstance(reals, list):
            raise ParseError("'reals' must be a list", "$.reals")
        names, bounds = [], []
        for i, r in enumerate(reals):
            path = f"$.reals[{i}]"
            if not isinstance(r, dict) or not {"name", "lower", "upper"} <= set(r):
                raise ParseError("real variables need name, lower and upper", path)
            names.append(r["name"])
            bounds.append((parse_rational(r["lower"], path + ".lower"),
                           parse_rational(r["upper"], path + ".upper")))
        universe = Universe(tuple(booleans), tuple(names), tuple(bounds))
        formula = parse_formula(doc["formula"], universe, "$.formula")
        weight = (parse_weight(doc["weight"], universe, "$.weight")
                  if "weight" in doc else Const(Fraction(1)))
        kwargs = {}
        if "query" in doc:
            kwargs["query"] = doc["query"]
        mc = doc.get("mc", {})
        if "samples" in mc:
            kwargs["mc_samples"] = int(mc["samples"])
        if "seed" in mc:
            kwargs["seed"] = int(mc["seed"])
        if "resolution" in doc.get("oracle", {}):
            kwargs["oracle_resolution"] = int(doc["oracle"]["resolution"])
        if "backend" in doc:
            kwargs["backend"] = doc["backend"]
        return cls(universe, formula, weight, **kwargs)

    def to_json(self) -> dict:
        u = self.universe
        return {
            "booleans": list(u.booleans),
            "reals": [{"name": n, "lower": str(lo), "upper": str(hi)}
                      for n, (lo, hi) in zip(u.reals, u.bounds)],
            "formula": formula_to_json(self.formula, u),
            "weight": weight_to_json(self.weight, u),
            "query": self.query,
            "mc": {"samples": self.mc_samples, "seed": self.seed},
            "oracle": {"resolution": self.oracle_resolution},
        }


def assignment_index(b: Sequence[bool]) -> int:
    idx = 0
    for v in b:
        idx = (idx << 1) | int(bool(v))
    return idx


# -- backend selection -----------------------------------------------------------


def exact_unavailable_reason(p: Problem) -> str | None:
    """Why the exact backend cannot take ``p``, or ``None`` if it can."""
    w = p.weight
    if not w.is_polynomial():
        return "weight is not piecewise polynomial"
    all_atoms = atoms(p.formula) + w.real_atoms()
    if any(not a.expr.is_linear() for a in all_atoms):
        return "non-linear real atoms"
    if p.universe.N > TRIANGULATION_DIM_CAP:
        return f"{p.universe.N} real variables exceeds the exact cap of {TRIANGULATION_DIM_CAP}"
    if w.degree() > DEGREE_CAP:
        return f"weight degree {w.degree()} exceeds the exact cap of {DEGREE_CAP}"
    distinct = {canonical_atom(a) for a in all_atoms if not a.expr.is_constant()}
    if len(distinct) > ATOM_CAP:
        return f"{len(distinct)} atoms exceeds the exact cap of {ATOM_CAP}"
    return None


def resolve_backend(p: Problem, backend: str | None = None) -> str:
    backend = backend or p.backend
    if backend == "mc":
        return "mc"
    reason = exact_unavailable_reason(p)
    if backend == "exact":
        if reason:
            raise BackendUnavailableError(f"exact backend unavailable: {reason}")
        return "exact"
    if reason:
        log.info("auto backend falls back to Monte Carlo: %s", reason)
        return "mc"
    return "exact"


# -- inner integrals ---------------------------------------------------------------


def integrate_section_exact(region: Formula, section: WeightSpec,
                            universe: Universe) -> tuple[Fraction, int]:
    """Exact ``int_{M(region)} section dlambda`` and the number of cells used."""
    if universe.N == 0:
        # lambda^0 is the unit point mass on R^0: the integral is the value there
        region = simplify(region)
        if region == FALSE:
            return Fraction(0), 0
        return section.evaluate((), ()), 1
    cells = decompose(region, universe.bounds, section.real_atoms())
    total = Fraction(0)
    for cell in cells:
        poly = section.polynomial(universe.N, cell.truth)
        value = integrate_poly_polytope(poly, cell.polytope)
        if value == 0:
            log.debug("cell %s contributes 0 (empty, degenerate or zero weight)", cell.signs)
        total += value
    return total, len(cells)


def integrate_section_mc(region: Formula, section: WeightSpec, universe: Universe, *,
                         n: int, seed: int, stream: Sequence[int] = (),
                         threads: int | None = None):
    return mc_integrate(
        lambda X: evaluate_array(region, X),
        section.evaluate_array,
        universe.bounds, n, seed, stream=stream, threads=threads,
    )


def compute_wmi(p: Problem, backend: str | None = None) -> MeasureResult:
    """``sum_{b in M_b(phi)} int_{M_x(phi)/b} w_b dlambda``.

    The exact backend integrates the polynomial pieces of ``w_b`` over each
    polytope cell of the conditioned formula; the Monte Carlo backend runs
    one seeded hit-or-miss integration over the box per assignment.  In
    ``auto`` mode the whole query goes to one backend.
    """
    method = resolve_backend(p, backend)
    start = time.perf_counter()
    u = p.universe
    breakdown: dict[tuple[bool, ...], Fraction | float] = {}
    if method == "exact":
        ncells = 0
        for b in enumerate_models(p.formula, u.M):
            value, k = integrate_section_exact(condition_on(p.formula, b), p.weight.section(b), u)
            breakdown[b] = value
            ncells += k
        return MeasureResult(
            sum(breakdown.values(), Fraction(0)), "exact", breakdown=breakdown, cells=ncells,
            elapsed=time.perf_counter() - start, definition="WMI",
        )
    variances = []
    for b in enumerate_models(p.formula, u.M):
        est = integrate_section_mc(condition_on(p.formula, b), p.weight.section(b), u,
                                   n=p.mc_samples, seed=p.seed,
                                   stream=(u.M, assignment_index(b)), threads=p.threads)
        breakdown[b] = est.estimate
        variances.append(est.stderr ** 2)
    return MeasureResult(
        math.fsum(breakdown.values()), "mc", stderr=math.sqrt(math.fsum(variances)),
        breakdown=breakdown, elapsed=time.perf_counter() - start, seed=p.seed,
        samples=p.mc_samples, definition="WMI" if p.weight.is_polynomial() else "L-WMI",
    )


def compute_wmi_cells_outer(p: Problem, backend: str | None = None) -> MeasureResult:
    """The same integral with the iteration order swapped.

    Exact: decompose the box once by every real atom of formula and weight,
    then for each cell sum over all of ``B^M`` the integral of ``w_b`` where
    the formula holds.  Monte Carlo: one shared real sample, with the sum
    over ``B^M`` taken inside the integrand.
    """
    method = resolve_backend(p, backend)
    start = time.perf_counter()
    u = p.universe
    every_b = list(product((True, False), repeat=u.M))
    extra = atoms(p.formula) + p.weight.real_atoms()
    if method == "exact":
        total = Fraction(0)
        cells = decompose(TRUE, u.bounds, extra)
        sections = {b: p.weight.section(b) for b in every_b}
        for cell in cells:
            known = {a: cell.truth(a) for a in extra if not a.expr.is_constant()}
            for b in every_b:
                if evaluate_skeleton(p.formula, b, known):
                    poly = sections[b].polynomial(u.N, cell.truth)
                    total += integrate_poly_polytope(poly, cell.polytope)
        return MeasureResult(total, "exact", cells=len(cells),
                             elapsed=time.perf_counter() - start, definition="L-WMI")

    def integrand(X):
        acc = np.zeros(X.shape[0])
        for b in every_b:
            mask = evaluate_array(p.formula, X, b)
            if mask.any():
                acc[mask] += p.weight.evaluate_array(X[mask], b)
        return acc

    est = mc_integrate(lambda X: evaluate_array(TRUE, X), integrand, u.bounds,
                       p.mc_samples, p.seed, stream=(u.M, 1 << 30), threads=p.threads)
    return MeasureResult(est.estimate, "mc", stderr=est.stderr, seed=p.seed,
                         samples=p.mc_samples, elapsed=time.perf_counter() - start,
                         definition="L-WMI")


def scale_weight(p: Problem, c, backend: str | None = None) -> MeasureResult:
    """``compute_wmi`` with the weight multiplied by the positive constant ``c``."""
    c = Fraction(c)
    if c <= 0:
        raise InputError("scale factor must be positive")
    return compute_wmi(replace(p, weight=p.weight.scaled(c)), backend)


# -- identity checks --------------------------------------------------------------


@dataclass
class Check:
    name: str
    lhs: Fraction | float
    rhs: Fraction | float
    passed: bool
    note: str = ""

    def to_json(self) -> dict:
        out = {"name": self.name, "lhs": number_to_json(self.lhs),
               "rhs": number_to_json(self.rhs), "pass": self.passed}
        if self.note:
            out["note"] = self.note
        return out


def _agree(a: MeasureResult, b: MeasureResult) -> bool:
    if a.is_exact and b.is_exact:
        return a.value == b.value
    se = math.hypot(a.stderr or 0.0, b.stderr or 0.0)
    return abs(float(a.value) - float(b.value)) <= max(4 * se, 1e-12)


def literal_weights_of(w: WeightSpec, M: int) -> LiteralWeights | None:
    """Recover literal weights when ``w`` is a product of ``ite(B_i, a, b)``
    factors with constant branches (times an optional constant)."""
    factors = list(w.args) if isinstance(w, Mul) else [w]
    pairs = [[Fraction(1), Fraction(1)] for _ in range(M)]
    seen = set()
    scale = Fraction(1)
    for f in factors:
        if isinstance(f, Const):
            scale *= f.value
        elif (isinstance(f, Ite) and isinstance(f.cond, BoolVar)
              and isinstance(f.then, Const) and isinstance(f.other, Const)
              and f.cond.index not in seen):
            seen.add(f.cond.index)
            pairs[f.cond.index] = [f.then.value, f.other.value]
        else:
            return None
    if scale != 1:
        if M == 0:
            return None
        pairs[0] = [scale * pairs[0][0], scale * pairs[0][1]]
    if any(v < 0 for pair in pairs for v in pair):
        return None
    return LiteralWeights(tuple(tuple(pair) for pair in pairs))


def check_identities(p: Problem, backend: str | None = None) -> list[Check]:
    """Run every equivalence applicable to the shape of ``p``.

    * always: iteration-order swap (Tonelli);
    * no real variables: WMC = L-WMC and WMC = WMI;
    * weight is a PDF: ``WMI(phi) = nu(M(phi))`` lies in [0, 1] and is
      complementary with ``not phi``, and the factorised measure
      ``eta x tau`` reproduces it.
    """
    from .measures import eta_of_formula, eta_times_tau, factorize, validate_pdf

    checks = []
    base = compute_wmi(p, backend)
    swapped = compute_wmi_cells_outer(p, base.method)
    checks.append(Check("tonelli", base.value, swapped.value, _agree(base, swapped)))

    u = p.universe
    if u.N == 0:
        phi = simplify(p.formula)
        if is_propositional(phi):
            lw = literal_weights_of(p.weight, u.M)
            if lw is not None:
                count = wmc(phi, lw)
                lebesgue = lwmc(phi, lift_literal_weights(lw))
                checks.append(Check("theorem1", count.value, lebesgue.value,
                                    count.value == lebesgue.value))
                checks.append(Check("corollary1", count.value, base.value, _agree(count, base)))
            else:
                table = AssignmentWeight.from_function(u.M, lambda b: p.weight.evaluate(b, ()))
                lebesgue = lwmc(phi, table)
                checks.append(Check("corollary1", lebesgue.value, base.value,
                                    _agree(lebesgue, base),
                                    note="weight is not literal-factored; compared with L-WMC"))

    report = validate_pdf(p.weight, u, backend=base.method, mc_samples=p.mc_samples,
                          seed=p.seed, threads=p.threads)
    if report.is_pdf:
        negated = compute_wmi(replace(p, formula=Not(p.formula)), base.method)
        in_range = 0 <= base.value <= 1 if base.is_exact else (
            -4 * base.stderr <= base.value <= 1 + 4 * base.stderr)
        checks.append(Check("theorem4_range", base.value, base.value, bool(in_range)))
        total = base.value + negated.value
        if base.is_exact:
            ok = total == 1
        else:
            ok = abs(total - 1) <= 4 * math.hypot(base.stderr, negated.stderr)
        checks.append(Check("theorem4_complement", total, Fraction(1) if base.is_exact else 1.0, ok))
        marginal, family = factorize(p.weight, u, backend=base.method, report=report)
        combined = eta_times_tau(marginal, family, p.formula, backend=base.method,
                                 mc_samples=p.mc_samples, seed=p.seed, threads=p.threads)
        checks.append(Check("corollary2", combined.value, base.value, _agree(combined, base)))
        if u.N == 0 and base.is_exact:
            eta_value = eta_of_formula(marginal, p.formula)
            checks.append(Check("theorem3", eta_value, base.value, eta_value == base.value))
    return checks
