"""
Unit tests for error payloads, settings and logging setup.
"""
import json

import pytest
import structlog
from pydantic import ValidationError

from src.config import CliSettings, Settings
from src.errors import (
    CapabilityError,
    DivergentSeriesError,
    InvalidInputError,
    PointMassError,
    RefusalError,
    SpectralError,
    SpectrumParseError,
)
from src.logging_config import configure_logging


class TestErrors:
    @pytest.mark.parametrize(
        "error, exit_code, status",
        [
            (InvalidInputError("x"), 3, 422),
            (CapabilityError("x"), 3, 409),
            (RefusalError("x"), 2, 409),
            (DivergentSeriesError("x"), 2, 409),
            (PointMassError("x"), 2, 409),
        ],
    )
    def test_codes(self, error, exit_code, status):
        assert isinstance(error, SpectralError)
        assert error.exit_code == exit_code
        assert error.http_status == status

    def test_refusal_payload(self):
        error = RefusalError("no continuity", criterion="sup-series", verdict="Undetermined")
        assert error.to_dict() == {
            "error": "refusal",
            "message": "no continuity",
            "criterion": "sup-series",
            "verdict": "Undetermined",
        }

    def test_parse_error_line(self):
        error = SpectrumParseError("bad dim", line=3)
        assert str(error) == "line 3: bad dim"
        assert error.to_dict()["line"] == 3
        assert error.code == "spectrum_parse_error"

    def test_code_override(self):
        assert InvalidInputError("x", code="custom").to_dict()["error"] == "custom"


class TestSettings:
    def test_environment_is_read(self, monkeypatch):
        monkeypatch.setenv("SPECTRAL_TARGET_TAIL", "1e-3")
        assert Settings().target_tail == 1e-3

    def test_cli_settings_ignore_environment(self, monkeypatch):
        monkeypatch.setenv("SPECTRAL_TARGET_TAIL", "1e-3")
        assert CliSettings().target_tail == 1e-12
        assert CliSettings(target_tail=1e-6).target_tail == 1e-6

    @pytest.mark.parametrize(
        "fields",
        [{"target_tail": 0.0}, {"workers": 0}, {"fit_t_min": 0.1, "fit_t_max": 0.01}, {"derivative_step": -1.0}],
    )
    def test_validation(self, fields):
        with pytest.raises(ValidationError):
            CliSettings(**fields)


class TestLogging:
    def test_json_lines(self, capsys):
        configure_logging("DEBUG", json_output=True)
        try:
            structlog.get_logger("spectral.test").info("summed", terms=12)
            line = capsys.readouterr().err.strip().splitlines()[-1]
            event = json.loads(line)
            assert event["event"] == "summed"
            assert event["terms"] == 12
            assert event["level"] == "info"
            assert event["logger"] == "spectral.test"
            assert "timestamp" in event
        finally:
            configure_logging("WARNING")

    def test_level_filter(self, capsys):
        configure_logging("WARNING", json_output=True)
        structlog.get_logger("spectral.quiet").info("hidden")
        assert "hidden" not in capsys.readouterr().err
