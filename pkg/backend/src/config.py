"""
Configuration management for the spectral engine.
"""
from typing import Optional

from pydantic import Field, validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Engine settings loaded from environment variables (prefix ``SPECTRAL_``)."""

    # Application Configuration
    environment: str = Field(default="development", description="Environment (development/staging/production)")
    log_level: str = Field(default="INFO", description="Logging level")
    log_json: bool = Field(default=False, description="Render log events as JSON lines")
    log_file: Optional[str] = Field(default=None, description="Optional file that also receives log output")
    api_host: str = Field(default="0.0.0.0", description="API host")
    api_port: int = Field(default=8001, description="API port")

    # Series truncation
    target_tail: float = Field(default=1e-12, description="Absolute error budget for certified series")
    hard_max_terms: int = Field(default=10_000_000, description="Safety cap on summed terms")
    uncertified_terms: int = Field(default=10_000, description="Terms summed when no tail bound exists")
    block_size: int = Field(default=4096, description="Block size for deterministic reductions")
    workers: int = Field(default=1, description="Threads used for block reductions")

    # Quadrature
    quadrature_order: int = Field(default=128, description="Gauss-Legendre order on class coordinates")
    conjugator_order: int = Field(default=64, description="Gauss-Legendre order over conjugator axes")
    conjugator_samples_log2: int = Field(default=12, description="log2 of Sobol conjugator samples")
    conjugator_seed: int = Field(default=20100531, description="Seed of the scrambled Sobol sequence")

    # Growth bound grid
    growth_grid_max: float = Field(default=1000.0, description="Upper end of the growth-bound grid")
    growth_grid_step: float = Field(default=0.01, description="Spacing of the growth-bound grid")

    # Regularity diagnostics
    term_floor: float = Field(default=1e-2, description="Lower envelope demanded by the divergence term test")

    # Asymptotics
    fit_t_min: float = Field(default=1e-3, description="Lower end of the small-time fit window")
    fit_t_max: float = Field(default=1e-2, description="Upper end of the small-time fit window")
    fit_samples: int = Field(default=10, description="Log-spaced samples in the fit window")
    derivative_step: float = Field(default=1e-6, description="Finite-difference step for generator checks")

    # Output
    float_digits: int = Field(default=17, description="Significant digits in CSV/JSON output")
    spectrum_dir: str = Field(default="./data/spectra", description="Directory searched for generic spectrum tables")

    @validator("target_tail", "growth_grid_max", "growth_grid_step", "derivative_step")
    def validate_positive_float(cls, v):
        """Validate that tolerances and steps are positive."""
        if not v > 0:
            raise ValueError("must be positive")
        return v

    @validator(
        "hard_max_terms", "uncertified_terms", "block_size", "workers",
        "quadrature_order", "conjugator_order", "fit_samples", "float_digits",
    )
    def validate_positive_int(cls, v):
        """Validate that counts are at least one."""
        if v < 1:
            raise ValueError("must be at least 1")
        return v

    @validator("fit_t_max")
    def validate_fit_window(cls, v, values):
        """Validate that the fit window is a proper interval."""
        t_min = values.get("fit_t_min")
        if t_min is not None and not 0 < t_min < v:
            raise ValueError("fit window must satisfy 0 < fit_t_min < fit_t_max")
        return v

    class Config:
        env_prefix = "SPECTRAL_"
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = False


class CliSettings(Settings):
    """Settings built only from explicit keyword input; the environment is ignored."""

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls,
        init_settings,
        env_settings,
        dotenv_settings,
        file_secret_settings,
    ):
        return (init_settings,)


# Global settings instance
settings = Settings()


def get_settings() -> Settings:
    """Get engine settings."""
    return settings
