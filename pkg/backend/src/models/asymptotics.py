"""
Small-time fits, counting functions and related reports.
"""
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, validator


class PowerLawFit(BaseModel):
    """Least-squares fit of ``log value = log C - p log t``."""

    C: float = Field(..., gt=0, description="Amplitude")
    p: float = Field(..., description="Exponent")
    residual: float = Field(..., ge=0, description="Maximum absolute log-residual")
    window: Tuple[float, float]
    samples: List[Tuple[float, float]] = Field(default_factory=list)

    def model_value(self, t: float) -> float:
        return self.C * t ** (-self.p)

    def to_dict(self) -> dict:
        return {
            "C": self.C,
            "p": self.p,
            "residual": self.residual,
            "window": list(self.window),
            "samples": [list(s) for s in self.samples],
        }


class CountingFunction(BaseModel):
    """``N(lambda)``: eigenvalues of ``-A`` not exceeding ``lambda``, counted with multiplicity ``d^2``."""

    thresholds: List[float]
    counts: List[int]

    @validator("counts")
    def validate_monotone(cls, v, values):
        """Counts are non-decreasing and aligned with thresholds."""
        thresholds = values.get("thresholds") or []
        if len(v) != len(thresholds):
            raise ValueError("one count per threshold")
        if any(b < a for a, b in zip(v, v[1:])):
            raise ValueError("counting function must be non-decreasing")
        return v


class KaramataReport(BaseModel):
    """Ratios ``N(lambda) Gamma(1 + rho) / lambda^rho`` on a doubling grid, against the fitted amplitude."""

    rho: float
    target: float
    thresholds: List[float]
    ratios: List[float]
    converged: bool
    tolerance: float = 0.1


class ExplorationReport(BaseModel):
    """Uncertified small-time exploration of an alpha-stable density at the identity."""

    group: str
    alpha: float
    b: float
    fit: PowerLawFit
    conjectured_p: Optional[float]
    certified_samples: int
    note: str


class ClosedFormValue(BaseModel):
    """A closed-form or dual-series evaluation and its estimated error."""

    value: float
    error_estimate: float = Field(0.0, ge=0)
    terms_used: int = Field(0, ge=0)
    exact: bool = False
