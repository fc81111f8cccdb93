"""
Exponent service: parsing, evaluation, growth bounds and decay classes.
"""
from typing import Dict, List, Optional, Sequence

import numpy as np
import structlog
from pydantic import TypeAdapter, ValidationError
from scipy.optimize import minimize_scalar

from ..config import Settings, get_settings
from ..errors import InvalidInputError
from ..models.exponent import (
    Atom,
    BernsteinView,
    ConvolutionExponent,
    DecayClass,
    NegDefExponent,
)

logger = structlog.get_logger(__name__)

_EXPONENT_ADAPTER = TypeAdapter(NegDefExponent)

# Relative slack added to grid-certified growth constants
GROWTH_SLACK = 1e-12

FAMILY_KEYS: Dict[str, Sequence[str]] = {
    "gaussian": ("variance",),
    "laplace": ("beta",),
    "stable": ("b", "alpha"),
    "cauchy": ("sigma",),
    "relativistic": ("mass",),
    "compound_poisson": ("rate", "atoms"),
    "levy_khintchine": ("variance", "atoms"),
    "gaussian_jumps": ("rate", "jump_variance"),
}
OPTIONAL_KEYS = {"levy_khintchine": {"atoms"}}


class ExponentService:
    """Service for negative-definite exponents."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()

    def parse_exponent(self, text: str) -> NegDefExponent:
        """
        Parse ``family=<name> key=value ...``.

        Atoms are written ``atoms=x:w;x:w``; a convolution joins part texts with
        `` + ``.
        """
        if not text or not text.strip():
            raise InvalidInputError("empty exponent text")
        parts = [p.strip() for p in text.split(" + ")]
        if len(parts) > 1:
            return self.convolve(*[self.parse_exponent(p) for p in parts])

        fields: Dict[str, str] = {}
        for token in text.split():
            key, sep, value = token.partition("=")
            if not sep or not value:
                raise InvalidInputError(f"expected key=value, got {token!r}")
            if key in fields:
                raise InvalidInputError(f"duplicate key {key!r}")
            fields[key] = value
        family = fields.pop("family", None)
        if family not in FAMILY_KEYS:
            raise InvalidInputError(f"unknown exponent family {family!r}; expected one of {', '.join(FAMILY_KEYS)}")
        allowed = set(FAMILY_KEYS[family])
        unknown = set(fields) - allowed
        missing = allowed - set(fields) - OPTIONAL_KEYS.get(family, set())
        if unknown:
            raise InvalidInputError(f"unknown keys for {family}: {', '.join(sorted(unknown))}")
        if missing:
            raise InvalidInputError(f"missing keys for {family}: {', '.join(sorted(missing))}")

        payload: Dict[str, object] = {"family": family}
        for key, value in fields.items():
            payload[key] = self._parse_atoms(value) if key == "atoms" else self._parse_float(key, value)
        try:
            return _EXPONENT_ADAPTER.validate_python(payload)
        except ValidationError as e:
            raise InvalidInputError(f"invalid {family} parameters: {e.errors()[0]['msg']}")

    @staticmethod
    def _parse_float(key: str, value: str) -> float:
        try:
            return float(value)
        except ValueError:
            raise InvalidInputError(f"{key} must be a number, got {value!r}")

    def _parse_atoms(self, value: str) -> List[Atom]:
        atoms = []
        for item in value.split(";"):
            position, sep, weight = item.partition(":")
            if not sep:
                raise InvalidInputError(f"atoms are written position:weight, got {item!r}")
            try:
                atoms.append(Atom(position=self._parse_float("position", position), weight=self._parse_float("weight", weight)))
            except ValidationError:
                raise InvalidInputError(f"atom positions and weights must be positive, got {item!r}")
        return atoms

    def format_exponent(self, e: NegDefExponent) -> str:
        """Canonical text; ``parse_exponent(format_exponent(e)) == e``."""
        if isinstance(e, ConvolutionExponent):
            return " + ".join(self.format_exponent(p) for p in e.parts)
        tokens = [f"family={e.family}"] + [f"{key}={value}" for key, value in e.parameters()]
        return " ".join(tokens)

    def convolve(self, *parts: NegDefExponent) -> ConvolutionExponent:
        """Exponent of the convolution of independent parts; nested convolutions are flattened."""
        flat: List[NegDefExponent] = []
        for part in parts:
            flat.extend(part.parts if isinstance(part, ConvolutionExponent) else [part])
        if len(flat) < 2:
            raise InvalidInputError("a convolution needs at least two parts")
        return ConvolutionExponent(parts=tuple(flat))

    def eval_eta(self, e: NegDefExponent, u):
        """``eta(u)``; scalars in, float out."""
        value = e.eta(np.asarray(u, dtype=float))
        return float(value) if np.ndim(value) == 0 else value

    def symbol_alpha(self, e: NegDefExponent, casimir):
        """``alpha_pi = -eta(sqrt(kappa_pi))``."""
        casimir = np.asarray(casimir, dtype=float)
        if np.any(casimir < 0):
            raise InvalidInputError("casimir must be non-negative")
        value = -e.eta(np.sqrt(casimir))
        return float(value) if np.ndim(value) == 0 else value

    def decay_class(self, e: NegDefExponent) -> DecayClass:
        return e.decay_class()

    def bernstein_view(self, e: NegDefExponent) -> Optional[BernsteinView]:
        """The Bernstein function ``f`` with ``eta(sqrt(u)) = f(u)``, for subordinated families."""
        if not e.has_bernstein:
            return None
        return BernsteinView(exponent=e)

    def growth_bound(self, e: NegDefExponent) -> float:
        """
        A K with ``eta(u) <= K (1 + u^2)``, not necessarily the smallest.

        K is the larger of the maximum over the verification grid and the family's
        analytic supremum, or an upper bound of it for jump families (bounded scalar
        search where no closed form is kept).
        """
        if isinstance(e, ConvolutionExponent):
            return float(sum(self.growth_bound(p) for p in e.parts))
        step = self.settings.growth_grid_step
        grid = np.arange(0.0, self.settings.growth_grid_max + 0.5 * step, step)
        grid_bound = float(np.max(e.eta(grid) / (1.0 + grid * grid)))

        analytic = e.analytic_growth_bound()
        if analytic is None:
            result = minimize_scalar(
                lambda u: -float(e.eta(u)) / (1.0 + u * u),
                bounds=(0.0, self.settings.growth_grid_max),
                method="bounded",
                options={"xatol": 1e-10},
            )
            analytic = -float(result.fun)
        bound = max(grid_bound, analytic) * (1.0 + GROWTH_SLACK)
        logger.debug("growth bound", family=e.family, grid=grid_bound, analytic=analytic, bound=bound)
        return bound
