"""
Analysis API endpoints: spectrum listing, kernel tables, regularity, fits and self-checks.

Every endpoint accepts the same keys as the command line and answers with the
JSON the ``--json`` output of the matching command would print.
"""
from typing import List, Optional, Tuple, Union

import structlog
from fastapi import APIRouter, Response
from pydantic import BaseModel, Field, ValidationError

from ..errors import InvalidInputError
from ..models.run_config import RunConfig

logger = structlog.get_logger(__name__)

# Create router
router = APIRouter(prefix="/api", tags=["analysis"])

# Global services (injected from main.py)
command_service = None


class SpectrumRequest(BaseModel):
    """Request model for the irrep listing."""
    group: str = Field("su2", description="torus:d, su2, so3 or generic")
    file: Optional[str] = Field(None, description="Spectrum table path for generic groups")
    count: Optional[int] = Field(None, description="Number of irreps to list")
    max_casimir: Optional[float] = Field(None, description="Casimir cutoff")


class AnalysisRequest(BaseModel):
    """Request model shared by the kernel, classify, fit and explore endpoints."""
    group: str = Field("su2", description="torus:d, su2, so3 or generic")
    file: Optional[str] = Field(None, description="Spectrum table path for generic groups")
    exponent: Optional[str] = Field(None, description="Exponent text, e.g. 'family=cauchy sigma=1'")
    times: Optional[Union[str, List[float]]] = Field(None, description="Time grid text or list")
    points: Optional[Union[str, List[List[float]]]] = Field(None, description="Class points")
    tail: Optional[float] = Field(None, description="Target tail bound")
    max_terms: Optional[int] = Field(None, description="Hard cap on summed terms")
    force_uncertified: bool = Field(False, description="Evaluate without an established continuity verdict")
    level: Optional[str] = Field(None, description="L2, C0 or Ck")
    k: Optional[int] = Field(None, description="Order for Ck")
    k_max: Optional[int] = Field(None, description="Largest k in the full report")
    window: Optional[Union[str, Tuple[float, float]]] = Field(None, description="Fit window")
    samples: Optional[int] = Field(None, description="Fit samples")
    alpha: Optional[float] = Field(None, description="Stability index for explore")
    b: Optional[float] = Field(None, description="Stable scale for explore")


class SelfcheckRequest(BaseModel):
    """Request model for self-checks; an empty list runs all of them."""
    only: List[str] = Field(default_factory=list, description="Check names")


def _run(command: str, request: BaseModel) -> Response:
    values = request.dict(exclude_none=True)
    if "points" in values and not isinstance(values["points"], str):
        values["points"] = [tuple(p) for p in values["points"]]
    try:
        config = RunConfig(command=command, as_json=True, **values)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ()))
        raise InvalidInputError(f"invalid {where or 'request'}: {first['msg']}")
    except ValueError as e:
        raise InvalidInputError(str(e))

    logger.info("api command", command=command, group=config.group)
    result = command_service.run(config)
    return Response(content=result.output, media_type="application/json")


@router.post("/spectrum")
def list_spectrum(request: SpectrumRequest) -> Response:
    """Irreps in ascending Casimir order."""
    return _run("spectrum", request)


@router.post("/kernel")
def kernel_table(request: AnalysisRequest) -> Response:
    """Density values over the time grid and class points."""
    return _run("kernel", request)


@router.post("/classify")
def classify(request: AnalysisRequest) -> Response:
    return _run("classify", request)


@router.post("/fit")
def fit(request: AnalysisRequest) -> Response:
    """Small-time power-law fit of the density at the identity."""
    return _run("fit", request)


@router.post("/explore")
def explore(request: AnalysisRequest) -> Response:
    return _run("explore", request)


@router.get("/selfcheck")
def list_selfchecks() -> dict:
    return {"checks": command_service.selfcheck_service.names()}


@router.post("/selfcheck")
def run_selfchecks(request: SelfcheckRequest) -> Response:
    """Runs the named checks; ``passed`` in the body says whether all of them passed."""
    return _run("selfcheck", request)
