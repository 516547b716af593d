"""Weighted model counting and integration as integrals against counting
and Lebesgue measure, with exact (rational) and Monte Carlo backends."""

from .boolean_engine import (
    AssignmentWeight,
    LiteralWeights,
    enumerate_models,
    lift_literal_weights,
    lwmc,
    wmc,
)
from .errors import (
    BackendUnavailableError,
    CapacityError,
    InputError,
    NegativeWeightError,
    NotAPdfError,
    ParseError,
    UndeclaredVariableError,
    WMIError,
)
from .formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    BoolVar,
    Formula,
    Not,
    Or,
    Universe,
    condition_on,
    interpret,
    parse_formula,
)
from .geometry import Halfspace, Polytope, Simplex, direct_volume, split, triangulate, volume
from .measures import BoolPdf, RealPdfFamily, eta, eta_times_tau, factorize, validate_pdf
from .montecarlo import mc_integrate
from .oracle import GridSpec, grid_oracle
from .polynomial import Polynomial, dirichlet_standard_simplex, integrate_poly_polytope
from .region import Cell, decompose
from .results import MeasureResult
from .weights import BlackBox, Const, Ite, WeightSpec, parse_weight
from .wmi import Problem, check_identities, compute_wmi, scale_weight

__version__ = "0.1.0"

__all__ = [
    "And",
    "AssignmentWeight",
    "Atom",
    "BackendUnavailableError",
    "BlackBox",
    "BoolPdf",
    "BoolVar",
    "CapacityError",
    "Cell",
    "Const",
    "FALSE",
    "Formula",
    "GridSpec",
    "Halfspace",
    "InputError",
    "Ite",
    "LiteralWeights",
    "MeasureResult",
    "NegativeWeightError",
    "Not",
    "NotAPdfError",
    "Or",
    "ParseError",
    "Polynomial",
    "Polytope",
    "Problem",
    "RealPdfFamily",
    "Simplex",
    "TRUE",
    "UndeclaredVariableError",
    "Universe",
    "WMIError",
    "WeightSpec",
    "check_identities",
    "compute_wmi",
    "condition_on",
    "decompose",
    "direct_volume",
    "dirichlet_standard_simplex",
    "enumerate_models",
    "eta",
    "eta_times_tau",
    "factorize",
    "grid_oracle",
    "integrate_poly_polytope",
    "interpret",
    "lift_literal_weights",
    "lwmc",
    "mc_integrate",
    "parse_formula",
    "parse_weight",
    "scale_weight",
    "split",
    "triangulate",
    "validate_pdf",
    "volume",
    "wmc",
]
