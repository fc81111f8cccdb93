"""
Kernel values and truncation policies.
"""
from typing import Optional, Union

from pydantic import BaseModel, Field


class TruncationPolicy(BaseModel):
    """Error budget and term cap for truncated series."""

    target_tail: float = Field(1e-12, gt=0, description="Absolute error budget")
    hard_max_terms: int = Field(10_000_000, ge=1, description="Safety cap on summed terms")

    class Config:
        frozen = True


class KernelValue(BaseModel):
    """A truncated series value with its certified tail bound, when one exists."""

    value: float
    terms_used: int = Field(..., ge=0)
    tail_bound: Optional[float] = Field(None, ge=0, description="None when uncertified")
    certified: bool

    @property
    def tail_text(self) -> Union[float, str]:
        return self.tail_bound if self.tail_bound is not None else "uncertified"

    def lower(self) -> float:
        return self.value - (self.tail_bound or 0.0)

    def upper(self) -> float:
        return self.value + (self.tail_bound or 0.0)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "terms_used": self.terms_used,
            "tail_bound": self.tail_text,
            "certified": self.certified,
        }
