from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence


def assignment_key(b: Sequence[bool]) -> str:
    """``(True, False)`` -> ``"10"``; the empty assignment is ``""``."""
    return "".join("1" if v else "0" for v in b)


def number_to_json(value):
    """Exact values as ``"p/q"`` strings, floats unchanged."""
    if isinstance(value, (Fraction, int)) and not isinstance(value, bool):
        return str(Fraction(value))
    return value


@dataclass
class MeasureResult:
    """A computed WMC/WMI/probability value.

    ``method`` is ``"exact"``, ``"mc"`` or ``"oracle"``.  Exact results hold a
    :class:`Fraction` and no ``stderr``; the ``breakdown`` maps each Boolean
    assignment to its contribution and sums to ``value``.
    """

    value: Fraction | float
    method: str
    stderr: float | None = None
    breakdown: dict[tuple[bool, ...], Fraction | float] = field(default_factory=dict)
    cells: int = 0
    elapsed: float = 0.0
    seed: int | None = None
    samples: int | None = None
    definition: str | None = None

    @property
    def is_exact(self) -> bool:
        return self.method == "exact"

    def to_json(self, *, breakdown: bool = False) -> dict:
        out = {"value": number_to_json(self.value), "method": self.method}
        if self.stderr is not None:
            out["stderr"] = self.stderr
        if self.seed is not None:
            out["seed"] = self.seed
        if self.samples is not None:
            out["samples"] = self.samples
        if self.definition is not None:
            out["definition"] = self.definition
        out["cells"] = self.cells
        if breakdown:
            out["breakdown"] = {
                assignment_key(b): number_to_json(v) for b, v in self.breakdown.items()
            }
        return out
