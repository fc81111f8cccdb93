"""
Health check endpoints for the spectral engine API.
"""
import time
from datetime import datetime

import structlog
from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field

from ..config import get_settings

logger = structlog.get_logger(__name__)

# Create router
router = APIRouter(prefix="/api", tags=["health"])

# Global services (injected from main.py)
command_service = None

STARTED_AT = time.monotonic()
VERSION = "1.0.0"


class HealthResponse(BaseModel):
    """Health check response model."""
    status: str = Field(..., description="Service health status")
    timestamp: str = Field(..., description="Health check timestamp")
    version: str = Field(..., description="Service version")
    uptime_seconds: int = Field(..., description="Seconds since the process started")
    groups: list[str] = Field(..., description="Built-in groups")
    selfchecks: int = Field(..., description="Number of registered self-checks")
    environment: str = Field(..., description="Environment")


@router.get("/health", response_model=HealthResponse)
async def health_check():
    """Reports whether the service graph is wired and answering."""
    try:
        settings = get_settings()
        if command_service is None:
            raise RuntimeError("command service not initialized")
        return HealthResponse(
            status="healthy",
            timestamp=datetime.utcnow().isoformat(),
            version=VERSION,
            uptime_seconds=int(time.monotonic() - STARTED_AT),
            groups=["torus:d", "su2", "so3", "generic"],
            selfchecks=len(command_service.selfcheck_service.names()),
            environment=settings.environment,
        )
    except Exception as e:
        logger.error("health check failed", error=str(e), exc_info=True)
        raise HTTPException(
            status_code=503,
            detail={
                "status": "unhealthy",
                "error": str(e),
                "timestamp": datetime.utcnow().isoformat(),
                "version": VERSION,
            },
        )


@router.get("/health/live")
async def liveness_check():
    """Kubernetes-style liveness check."""
    return {
        "status": "alive",
        "timestamp": datetime.utcnow().isoformat(),
        "version": VERSION,
    }
