"""
Run configuration shared by the command line and the HTTP API.
"""
import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, validator

COMMANDS = ("spectrum", "kernel", "classify", "fit", "selfcheck", "explore", "serve")
LEVELS = ("L2", "C0", "Ck")

# Text key -> field name; the order is the canonical line order
TEXT_KEYS = (
    ("command", "command"),
    ("group", "group"),
    ("file", "file"),
    ("exponent", "exponent"),
    ("t", "times"),
    ("points", "points"),
    ("tail", "tail"),
    ("max-terms", "max_terms"),
    ("out", "out"),
    ("json", "as_json"),
    ("force-uncertified", "force_uncertified"),
    ("only", "only"),
    ("list", "list_checks"),
    ("count", "count"),
    ("max-casimir", "max_casimir"),
    ("level", "level"),
    ("k", "k"),
    ("k-max", "k_max"),
    ("window", "window"),
    ("samples", "samples"),
    ("alpha", "alpha"),
    ("b", "b"),
)
FIELD_FOR_KEY = dict(TEXT_KEYS)
BOOL_TEXT = {"true": True, "false": False, "1": True, "0": False, "yes": True, "no": False}


def parse_time_grid(text: str) -> List[float]:
    """``a:b:n`` (linear), ``a:b:n:log`` (geometric) or a comma list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
            raise ValueError(f"time grid must be a:b:n or a:b:n:log, got {text!r}")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValueError("time grid needs at least one point")
        if len(parts) == 4:
            if start <= 0 or stop <= 0:
                raise ValueError("a log-spaced time grid needs positive ends")
            return [float(x) for x in np.geomspace(start, stop, count)]
        return [float(x) for x in np.linspace(start, stop, count)]
    return [float(x) for x in text.split(",") if x.strip()]


def parse_points(text: str) -> List[Tuple[float, ...]]:
    """Class points separated by ``;``, coordinates by ``,``."""
    return [tuple(float(c) for c in chunk.split(",")) for chunk in text.split(";") if chunk.strip()]


class RunConfig(BaseModel):
    """Everything one command needs; invalid values are rejected before any computation."""

    command: str = Field(..., description="Command to run")
    group: str = Field("su2", description="torus:d, su2, so3 or generic")
    file: Optional[str] = Field(None, description="Spectrum table for generic groups")
    exponent: Optional[str] = Field(None, description="Exponent text, e.g. 'family=cauchy sigma=1'")
    times: List[float] = Field(default_factory=lambda: [1.0], description="Time grid")
    points: Optional[List[Tuple[float, ...]]] = Field(None, description="Class points; identity when omitted")
    tail: float = Field(1e-12, gt=0, description="Target tail bound")
    max_terms: int = Field(10_000_000, ge=1, description="Hard cap on summed terms")
    out: Optional[str] = Field(None, description="Output path; stdout when omitted")
    as_json: bool = Field(False, description="JSON instead of CSV")
    force_uncertified: bool = Field(False, description="Evaluate even when continuity is not established")
    only: List[str] = Field(default_factory=list, description="Self-checks to run")
    list_checks: bool = Field(False, description="List self-check names")
    count: Optional[int] = Field(None, ge=1)
    max_casimir: Optional[float] = Field(None, gt=0)
    level: Optional[str] = Field(None, description="L2, C0 or Ck; all levels when omitted")
    k: Optional[int] = Field(None, ge=0)
    k_max: int = Field(10, ge=0)
    window: Optional[Tuple[float, float]] = Field(None, description="Fit window (t_min, t_max)")
    samples: Optional[int] = Field(None, ge=5)
    alpha: Optional[float] = Field(None, gt=0, lt=2)
    b: float = Field(1.0, gt=0)

    @validator("command")
    def validate_command(cls, v):
        if v not in COMMANDS:
            raise ValueError(f"unknown command {v!r}; expected one of {', '.join(COMMANDS)}")
        return v

    @validator("times", pre=True)
    def validate_times(cls, v):
        """Accepts the grid grammar as text."""
        times = parse_time_grid(v) if isinstance(v, str) else [float(x) for x in v]
        if not times:
            raise ValueError("time grid is empty")
        if any(not math.isfinite(t) or t < 0 for t in times):
            raise ValueError("times must be finite and non-negative")
        return times

    @validator("points", pre=True)
    def validate_points(cls, v):
        if isinstance(v, str):
            return parse_points(v)
        return v

    @validator("only", pre=True)
    def validate_only(cls, v):
        if isinstance(v, str):
            return [name.strip() for name in v.split(",") if name.strip()]
        return v

    @validator("window", pre=True)
    def validate_window(cls, v):
        if isinstance(v, str):
            lo, sep, hi = v.partition(":")
            if not sep:
                raise ValueError("window is written t_min:t_max")
            v = (float(lo), float(hi))
        if v is not None and not 0 < v[0] < v[1]:
            raise ValueError("window needs 0 < t_min < t_max")
        return v

    @validator("level")
    def validate_level(cls, v):
        if v is not None and v not in LEVELS:
            raise ValueError(f"level must be one of {', '.join(LEVELS)}")
        return v

    @validator("k", always=True)
    def validate_k(cls, v, values):
        """Ck needs its order."""
        if values.get("level") == "Ck" and v is None:
            raise ValueError("level Ck needs k")
        return v

    def to_text(self) -> str:
        """Canonical ``key=value`` lines; ``from_text(to_text())`` gives back an equal config."""
        lines = []
        for key, field in TEXT_KEYS:
            value = getattr(self, field)
            if value is None or value == [] or (isinstance(value, bool) and not value):
                continue
            lines.append(f"{key}={_render_value(field, value)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, **overrides) -> "RunConfig":
        """Parse ``key=value`` lines (``#`` comments allowed); keyword ``overrides`` win."""
        payload = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or key not in FIELD_FOR_KEY:
                raise ValueError(f"bad config line {raw.strip()!r}")
            field = FIELD_FOR_KEY[key]
            value = value.strip()
            if field in ("as_json", "force_uncertified", "list_checks"):
                if value.lower() not in BOOL_TEXT:
                    raise ValueError(f"{key} must be true or false")
                payload[field] = BOOL_TEXT[value.lower()]
            else:
                payload[field] = value
        payload.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**payload)


def _render_value(field: str, value) -> str:
    if field == "times":
        return ",".join(repr(float(t)) for t in value)
    if field == "points":
        return ";".join(",".join(repr(float(c)) for c in p) for p in value)
    if field == "only":
        return ",".join(value)
    if field == "window":
        return f"{float(value[0])!r}:{float(value[1])!r}"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)
