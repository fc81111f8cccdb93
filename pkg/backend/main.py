"""
Spectral engine FastAPI application entry point.
"""
from contextlib import asynccontextmanager

import structlog
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from src.config import get_settings
from src.errors import SpectralError
from src.logging_config import configure_logging
from src.services.command_service import CommandService
from src.api.analysis_endpoints import router as analysis_router
from src.api.health_endpoints import router as health_router

settings = get_settings()
configure_logging(settings.log_level, json_output=settings.log_json, log_file=settings.log_file)

logger = structlog.get_logger(__name__)

# Global services
command_service = CommandService(settings)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Application lifespan manager."""
    logger.info("starting spectral engine api", environment=settings.environment)
    logger.info("self-checks registered", count=len(command_service.selfcheck_service.names()))
    yield
    logger.info("shutting down spectral engine api")


# Create FastAPI app
app = FastAPI(
    title="Spectral Engine API",
    description="Densities, regularity and asymptotics of central Levy measures on compact Lie groups",
    version="1.0.0",
    lifespan=lifespan,
)

# Add CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Inject services into routers
from src.api import analysis_endpoints, health_endpoints  # noqa: E402
analysis_endpoints.command_service = command_service
health_endpoints.command_service = command_service

# Include routers
app.include_router(analysis_router)
app.include_router(health_router)


@app.get("/")
async def root():
    """Root endpoint."""
    return {"message": "Spectral Engine API", "version": "1.0.0"}


@app.exception_handler(SpectralError)
async def spectral_exception_handler(request: Request, exc: SpectralError):
    """Engine errors keep their code and carry their HTTP status."""
    logger.warning("request refused", path=request.url.path, error=exc.code, message=exc.message)
    return JSONResponse(status_code=exc.http_status, content=exc.to_dict())


@app.exception_handler(Exception)
async def global_exception_handler(request: Request, exc: Exception):
    """Global exception handler."""
    logger.error("unhandled exception", path=request.url.path, error=str(exc), exc_info=True)
    return JSONResponse(
        status_code=500,
        content={
            "error": "internal_server_error",
            "message": "An internal server error occurred",
        },
    )


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(
        "main:app",
        host=settings.api_host,
        port=settings.api_port,
        reload=settings.environment == "development",
        log_level=settings.log_level.lower(),
    )
