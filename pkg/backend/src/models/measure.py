"""
Central measures and regularity verdicts.
"""
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, validator

from .exponent import NegDefExponent
from .spectrum import GroupSpectrum


class CentralMeasure(BaseModel):
    """A spectrum, an exponent and a time: the measure with coefficients ``exp(-t eta(sqrt(kappa)))``."""

    spectrum: GroupSpectrum
    exponent: NegDefExponent
    t: float = Field(..., ge=0, description="Time parameter")

    def at_time(self, t: float) -> "CentralMeasure":
        """Same spectrum and exponent at another time."""
        return CentralMeasure(spectrum=self.spectrum, exponent=self.exponent, t=t)

    class Config:
        frozen = True


class RegularityLevel(str, Enum):
    L2 = "L2"
    C0 = "C0"
    CK = "Ck"


class Verdict(str, Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    UNDETERMINED = "Undetermined"


class Criterion(str, Enum):
    """Convergence criteria for the density: square-integrable, continuous and k-times differentiable."""

    L2_SERIES = "l2-series"
    SUP_SERIES = "sup-series"
    SOBOLEV_SERIES = "sobolev-series"

    @property
    def formula(self) -> str:
        return {
            "l2-series": "sum d^2 |c|^2 < inf",
            "sup-series": "sum d^2 |c| < inf",
            "sobolev-series": "sum d^2 (1 + kappa)^p |c|^2 < inf with p > k + dim/2",
        }[self.value]


class RegularityVerdict(BaseModel):
    """Outcome of a regularity test, with the evidence it rests on."""

    level: RegularityLevel
    k: Optional[int] = Field(None, ge=0, description="Differentiability order for Ck")
    verdict: Verdict
    criterion: Criterion
    witness: str = Field(..., description="Argument or numerical evidence for the verdict")
    partial_sum: float = Field(..., description="Partial sum of the criterion series")
    terms_used: int = Field(..., ge=0)
    tail_bound: Optional[float] = Field(None, ge=0)

    @validator("k")
    def validate_k(cls, v, values):
        """Ck carries its order; the other levels do not."""
        if values.get("level") == RegularityLevel.CK and v is None:
            raise ValueError("Ck verdicts need k")
        return v

    def level_name(self) -> str:
        if self.level == RegularityLevel.CK:
            return f"C{self.k}"
        return self.level.value

    def to_dict(self) -> dict:
        payload = {
            "level": self.level_name(),
            "verdict": self.verdict.value,
            "criterion": self.criterion.value,
            "formula": self.criterion.formula,
            "witness": self.witness,
            "partial_sum": self.partial_sum,
            "terms_used": self.terms_used,
        }
        if self.tail_bound is not None:
            payload["tail_bound"] = self.tail_bound
        return payload


class ZetaVerdict(str, Enum):
    CONVERGES = "Converges"
    DIVERGES = "Diverges"
    UNDETERMINED = "Undetermined"


class ZetaReport(BaseModel):
    """Partial sum of ``sum kappa^-s`` over non-trivial irreps and the analytic convergence verdict."""

    s: float
    partial_sum: float
    verdict: ZetaVerdict
    terms_used: int = Field(..., ge=0)
    tail_bound: Optional[float] = Field(None, ge=0)
    truncated: bool = False
