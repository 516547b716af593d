"""Probability measures induced by weights.

A weight whose total mass over ``B^M x box`` is 1 is a joint density.  It
factors uniquely into a Boolean marginal ``w_B(b) = int w_b dlambda`` and
a family of real conditionals ``w_x^b = w_b / w_B(b)`` (0 where the
marginal vanishes).  The product of the marginal's measure ``eta`` and the
conditional kernel ``tau`` reproduces the weighted model integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .boolean_engine import enumerate_models, lift_literal_weights
from .errors import InputError, NotAPdfError
from .formula import TRUE, Formula, Universe, condition_on, is_propositional
from .results import MeasureResult, assignment_key, number_to_json
from .weights import Const, Mul, WeightSpec
from .wmi import (
    Problem,
    assignment_index,
    compute_wmi,
    integrate_section_exact,
    integrate_section_mc,
)

__all__ = [
    "BoolPdf",
    "PdfReport",
    "RealPdfFamily",
    "eta",
    "eta_of_formula",
    "eta_times_tau",
    "factorize",
    "lift_literal_weights",
    "validate_pdf",
]


class BoolPdf:
    """A probability mass function on ``B^M``, stored as a full table."""

    def __init__(self, M: int, table: Mapping[tuple[bool, ...], object]):
        self.M = M
        full = {}
        for b in product((True, False), repeat=M):
            v = table.get(b, 0)
            v = v if isinstance(v, float) else Fraction(v)
            if v < 0:
                raise NotAPdfError(f"negative probability {v} at {assignment_key(b)}")
            full[b] = v
        self.table = full
        total = sum(full.values())
        exact = all(isinstance(v, Fraction) for v in full.values())
        if (total != 1) if exact else abs(total - 1) > 1e-9:
            raise NotAPdfError(f"probabilities sum to {total}, not 1")

    def __call__(self, b: Sequence[bool]) -> Fraction | float:
        return self.table[tuple(bool(v) for v in b)]

    def to_json(self) -> dict:
        return {assignment_key(b): number_to_json(v) for b, v in self.table.items()}


def eta(pdf: BoolPdf, s: Iterable[Sequence[bool]]):
    """``eta(S) = sum_{b in S} w_B(b)``; duplicates in ``s`` count once."""
    chosen = {tuple(bool(v) for v in b) for b in s}
    values = [pdf(b) for b in chosen]
    if any(isinstance(v, float) for v in values):
        return math.fsum(float(v) for v in values)
    return sum(values, Fraction(0))


def eta_of_formula(pdf: BoolPdf, f: Formula):
    """``eta`` of the model set of a propositional formula."""
    if not is_propositional(f):
        raise InputError("eta_of_formula expects a propositional formula")
    return eta(pdf, enumerate_models(f, pdf.M))


@dataclass
class PdfReport:
    mass: Fraction | float
    is_pdf: bool
    method: str
    stderr: float | None = None
    breakdown: dict = field(default_factory=dict)
    tolerance: float = 0.0

    def to_json(self) -> dict:
        out = {"mass": number_to_json(self.mass), "is_pdf": self.is_pdf,
               "method": self.method, "tolerance": self.tolerance}
        if self.stderr is not None:
            out["stderr"] = self.stderr
        return out


def validate_pdf(w: WeightSpec, universe: Universe, *, backend: str = "auto",
                 mc_samples: int = 100_000, seed: int = 0,
                 threads: int | None = None) -> PdfReport:
    """Total mass of ``w`` over ``B^M x box`` and whether it equals 1.

    The exact backend demands a mass of exactly 1; the Monte Carlo backend
    accepts ``|mass - 1| <= 3 stderr``.
    """
    p = Problem(universe, TRUE, w, backend=backend, mc_samples=mc_samples, seed=seed,
                threads=threads)
    r = compute_wmi(p)
    if r.is_exact:
        ok, tol = r.value == 1, 0.0
    else:
        tol = 3 * r.stderr
        ok = abs(r.value - 1) <= tol
    return PdfReport(r.value, bool(ok), r.method, r.stderr, r.breakdown, tol)


@dataclass
class RealPdfFamily:
    """The conditionals ``w_x^b``, kept unnormalised with separate constants.

    ``sections[b]`` is ``w_b`` and ``normalizers[b]`` is ``w_B(b)``; division
    happens only at evaluation so the exact path never divides polynomials.
    """

    universe: Universe
    sections: dict[tuple[bool, ...], WeightSpec]
    normalizers: dict[tuple[bool, ...], Fraction | float]

    def conditional(self, b: Sequence[bool]) -> WeightSpec:
        b = tuple(b)
        z = self.normalizers[b]
        if z == 0:
            return Const(Fraction(0))
        inv = Fraction(1) / z if isinstance(z, Fraction) else 1.0 / z
        return Mul((Const(inv), self.sections[b]))

    def density(self, b: Sequence[bool], x: Sequence):
        b = tuple(b)
        z = self.normalizers[b]
        if z == 0:
            return Fraction(0)
        return self.sections[b].evaluate(b, x) / z

    def density_array(self, b: Sequence[bool], X) -> np.ndarray:
        b = tuple(b)
        z = self.normalizers[b]
        X = np.asarray(X, dtype=float)
        if z == 0:
            return np.zeros(X.shape[0])
        return self.sections[b].evaluate_array(X, b) / float(z)

    def to_json(self) -> dict:
        return {assignment_key(b): {"normalizer": number_to_json(z), "is_zero": z == 0}
                for b, z in self.normalizers.items()}


def factorize(w: WeightSpec, universe: Universe, *, backend: str = "auto",
              mc_samples: int = 100_000, seed: int = 0, threads: int | None = None,
              report: PdfReport | None = None) -> tuple[BoolPdf, RealPdfFamily]:
    """Split a joint density into its Boolean marginal and real conditionals."""
    if report is None:
        report = validate_pdf(w, universe, backend=backend, mc_samples=mc_samples,
                              seed=seed, threads=threads)
    if not report.is_pdf:
        raise NotAPdfError(f"weight has total mass {report.mass}, not 1")
    zero = Fraction(0) if report.method == "exact" else 0.0
    normalizers = {b: report.breakdown.get(b, zero)
                   for b in product((True, False), repeat=universe.M)}
    if report.method != "exact":
        # renormalise Monte Carlo marginals so they form a pmf
        total = math.fsum(normalizers.values())
        marginal = BoolPdf(universe.M, {b: v / total for b, v in normalizers.items()})
    else:
        marginal = BoolPdf(universe.M, normalizers)
    sections = {b: w.section(b) for b in normalizers}
    return marginal, RealPdfFamily(universe, sections, normalizers)


def eta_times_tau(marginal: BoolPdf, family: RealPdfFamily, s: Formula, *,
                  backend: str = "exact", mc_samples: int = 100_000, seed: int = 0,
                  threads: int | None = None) -> MeasureResult:
    """``(eta x tau)(M(s)) = sum_b w_B(b) * tau^b(M(s)/b)``.

    ``tau^b(E) = int_E w_x^b dlambda`` is computed on the unnormalised
    section and divided by its normaliser afterwards.
    """
    u = family.universe
    breakdown = {}
    if backend == "exact":
        for b in product((True, False), repeat=u.M):
            z = family.normalizers[b]
            if z == 0:
                breakdown[b] = Fraction(0)
                continue
            inner, _ = integrate_section_exact(condition_on(s, b), family.sections[b], u)
            breakdown[b] = marginal(b) * inner / z
        return MeasureResult(sum(breakdown.values(), Fraction(0)), "exact",
                             breakdown=breakdown, definition="eta x tau")
    variances = []
    for b in product((True, False), repeat=u.M):
        z = float(family.normalizers[b])
        if z == 0:
            breakdown[b] = 0.0
            continue
        est = integrate_section_mc(condition_on(s, b), family.sections[b], u, n=mc_samples,
                                   seed=seed, stream=(u.M, assignment_index(b), 7),
                                   threads=threads)
        scale = float(marginal(b)) / z
        breakdown[b] = scale * est.estimate
        variances.append((scale * est.stderr) ** 2)
    return MeasureResult(math.fsum(breakdown.values()), "mc",
                         stderr=math.sqrt(math.fsum(variances)), breakdown=breakdown,
                         seed=seed, samples=mc_samples, definition="eta x tau")
