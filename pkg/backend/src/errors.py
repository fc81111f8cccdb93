"""
Error types raised by the spectral engine.

Every error carries a machine-readable ``code``, the CLI exit code and the HTTP
status the API answers with.
"""
from typing import Any, Dict, Optional


class SpectralError(Exception):
    """Base class for all engine errors."""

    code = "spectral_error"
    exit_code = 3
    http_status = 400

    def __init__(self, message: str, code: Optional[str] = None):
        super().__init__(message)
        self.message = message
        if code is not None:
            self.code = code

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable form used by the CLI and the API."""
        return {"error": self.code, "message": self.message}


class InvalidInputError(SpectralError):
    """Parameters or input text were rejected before any computation."""

    code = "invalid_input"
    exit_code = 3
    http_status = 422


class SpectrumParseError(InvalidInputError):
    """A generic spectrum table could not be parsed."""

    code = "spectrum_parse_error"

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line

    def to_dict(self) -> Dict[str, Any]:
        payload = super().to_dict()
        payload["line"] = self.line
        return payload


class KindMismatchError(InvalidInputError):
    """Group elements of different kinds were combined."""

    code = "kind_mismatch"


class SpectrumMismatchError(InvalidInputError):
    """Operands are bound to different spectra or exponents."""

    code = "spectrum_mismatch"


class CapabilityError(SpectralError):
    """The requested operation is not available for this spectrum or data."""

    code = "capability"
    exit_code = 3
    http_status = 409


class RefusalError(SpectralError):
    """Evaluation refused because the regularity criterion is not established."""

    code = "refusal"
    exit_code = 2
    http_status = 409

    def __init__(self, message: str, criterion: Optional[str] = None, verdict: Optional[str] = None,
                 code: Optional[str] = None):
        super().__init__(message, code=code)
        self.criterion = criterion
        self.verdict = verdict

    def to_dict(self) -> Dict[str, Any]:
        payload = super().to_dict()
        payload["criterion"] = self.criterion
        payload["verdict"] = self.verdict
        return payload


class DivergentSeriesError(RefusalError):
    """The requested series does not converge."""

    code = "divergent_series"


class PointMassError(RefusalError):
    """A measure at t = 0 is the point mass at the identity and has no density."""

    code = "point_mass"
