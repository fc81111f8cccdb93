"""
Negative-definite exponents eta and their decay classes.

Each family is a frozen pydantic model evaluating ``eta`` on numpy arrays. The
decay class of a family is an analytic fact about that family and is hard-coded
here; nothing is inferred from samples.
"""
import math
from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, validator

# Relativistic lower bound eta(u) >= RELATIVISTIC_SLOPE * u for u >= u0
RELATIVISTIC_SLOPE = 0.9
ATOM_WEIGHT_TOLERANCE = 1e-12


class ExponentialType(BaseModel):
    """``eta(u) >= c * u**gamma`` for ``u >= u0``."""

    kind: Literal["exponential"] = "exponential"
    gamma: float = Field(..., gt=0, le=2)
    c: float = Field(..., gt=0)
    u0: float = Field(0.0, ge=0)

    class Config:
        frozen = True


class Logarithmic(BaseModel):
    """``eta(u) >= ell * log(1 + scale * u**2)`` for all u, with matching logarithmic growth."""

    kind: Literal["logarithmic"] = "logarithmic"
    ell: float = Field(..., gt=0)
    scale: float = Field(..., gt=0)

    class Config:
        frozen = True


class Bounded(BaseModel):
    """``eta(u) <= bound`` for all u."""

    kind: Literal["bounded"] = "bounded"
    bound: float = Field(..., ge=0)

    class Config:
        frozen = True


DecayClass = Union[ExponentialType, Logarithmic, Bounded]


class Atom(BaseModel):
    """Symmetric jump of size ``position`` carrying mass ``weight``."""

    position: float = Field(..., gt=0)
    weight: float = Field(..., gt=0)

    class Config:
        frozen = True


class BernsteinView(BaseModel):
    """Subordination view: ``eta(sqrt(u)) = f(u)`` for ``u >= 0``."""

    exponent: "NegDefExponent"

    def f(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return self.exponent.bernstein(u)

    class Config:
        frozen = True


class ExponentBase(BaseModel):
    """Common interface of all exponent families."""

    def eta(self, u) -> np.ndarray:
        raise NotImplementedError

    def decay_class(self) -> DecayClass:
        raise NotImplementedError

    def analytic_growth_bound(self) -> Optional[float]:
        """Closed-form ``sup eta(u) / (1 + u^2)`` or an upper bound of it; None when unavailable."""
        return None

    def bernstein(self, u) -> np.ndarray:
        raise NotImplementedError

    @property
    def has_bernstein(self) -> bool:
        return False

    def parameters(self) -> List[Tuple[str, str]]:
        raise NotImplementedError

    class Config:
        frozen = True


def _format_atoms(atoms: Tuple[Atom, ...]) -> str:
    return ";".join(f"{a.position!r}:{a.weight!r}" for a in atoms)


def _atom_part(atoms: Tuple[Atom, ...], u: np.ndarray) -> np.ndarray:
    """``sum_i w_i * (1 - cos(u x_i))`` written as ``2 sin^2`` to keep small-u accuracy."""
    total = np.zeros_like(u)
    for atom in atoms:
        total = total + atom.weight * 2.0 * np.sin(0.5 * u * atom.position) ** 2
    return total


def _atom_growth(atoms: Tuple[Atom, ...]) -> float:
    """
    Upper bound of ``sup _atom_part(u) / (1 + u^2)``.

    Each atom contributes ``w min(2, x^2 u^2 / 2)``, whose ratio peaks at ``u^2 = 4 / x^2``.
    """
    return math.fsum(a.weight * 2.0 * a.position ** 2 / (a.position ** 2 + 4.0) for a in atoms)


class GaussianExponent(ExponentBase):
    """Brownian motion: ``eta(u) = variance * u^2 / 2``."""

    family: Literal["gaussian"] = "gaussian"
    variance: float = Field(..., gt=0)

    def eta(self, u):
        u = np.asarray(u, dtype=float)
        return 0.5 * self.variance * u * u

    def decay_class(self):
        return ExponentialType(gamma=2.0, c=0.5 * self.variance)

    def analytic_growth_bound(self):
        return 0.5 * self.variance

    def bernstein(self, u):
        return 0.5 * self.variance * np.asarray(u, dtype=float)

    @property
    def has_bernstein(self):
        return True

    def parameters(self):
        return [("variance", repr(self.variance))]


class LaplaceExponent(ExponentBase):
    """Gamma subordination: ``eta(u) = log(1 + beta^2 u^2)``."""

    family: Literal["laplace"] = "laplace"
    beta: float = Field(..., gt=0)

    def eta(self, u):
        u = np.asarray(u, dtype=float)
        return np.log1p((self.beta * u) ** 2)

    def decay_class(self):
        return Logarithmic(ell=1.0, scale=self.beta ** 2)

    def bernstein(self, u):
        return np.log1p(self.beta ** 2 * np.asarray(u, dtype=float))

    @property
    def has_bernstein(self):
        return True

    def parameters(self):
        return [("beta", repr(self.beta))]


class StableExponent(ExponentBase):
    """Symmetric alpha-stable: ``eta(u) = b^alpha |u|^alpha``."""

    family: Literal["stable"] = "stable"
    b: float = Field(..., gt=0)
    alpha: float = Field(..., gt=0, lt=2)

    def eta(self, u):
        u = np.asarray(u, dtype=float)
        return self.b ** self.alpha * np.abs(u) ** self.alpha

    def decay_class(self):
        return ExponentialType(gamma=self.alpha, c=self.b ** self.alpha)

    def analytic_growth_bound(self):
        a = self.alpha
        u_sq = a / (2.0 - a)
        return self.b ** a * u_sq ** (0.5 * a) / (1.0 + u_sq)

    def bernstein(self, u):
        return self.b ** self.alpha * np.asarray(u, dtype=float) ** (0.5 * self.alpha)

    @property
    def has_bernstein(self):
        return True

    def parameters(self):
        return [("b", repr(self.b)), ("alpha", repr(self.alpha))]


class CauchyExponent(ExponentBase):
    """Cauchy process: ``eta(u) = sigma |u|``."""

    family: Literal["cauchy"] = "cauchy"
    sigma: float = Field(..., gt=0)

    def eta(self, u):
        return self.sigma * np.abs(np.asarray(u, dtype=float))

    def decay_class(self):
        return ExponentialType(gamma=1.0, c=self.sigma)

    def analytic_growth_bound(self):
        return 0.5 * self.sigma

    def bernstein(self, u):
        return self.sigma * np.sqrt(np.asarray(u, dtype=float))

    @property
    def has_bernstein(self):
        return True

    def parameters(self):
        return [("sigma", repr(self.sigma))]


class RelativisticExponent(ExponentBase):
    """Relativistic Cauchy: ``eta(u) = sqrt(u^2 + m^2) - m``."""

    family: Literal["relativistic"] = "relativistic"
    mass: float = Field(..., gt=0)

    def eta(self, u):
        u = np.asarray(u, dtype=float)
        # u^2 / (sqrt(u^2 + m^2) + m) avoids cancellation for small u
        return u * u / (np.sqrt(u * u + self.mass ** 2) + self.mass)

    def decay_class(self):
        c = RELATIVISTIC_SLOPE
        return ExponentialType(gamma=1.0, c=c, u0=2.0 * c * self.mass / (1.0 - c * c))

    def bernstein(self, u):
        u = np.asarray(u, dtype=float)
        return u / (np.sqrt(u + self.mass ** 2) + self.mass)

    @property
    def has_bernstein(self):
        return True

    def parameters(self):
        return [("mass", repr(self.mass))]


class CompoundPoissonExponent(ExponentBase):
    """Compound Poisson with symmetric atomic jump law: ``eta(u) = rate * sum w_i (1 - cos(u x_i))``."""

    family: Literal["compound_poisson"] = "compound_poisson"
    rate: float = Field(..., gt=0)
    atoms: Tuple[Atom, ...] = Field(..., min_length=1)

    @validator("atoms")
    def validate_atoms(cls, v):
        """The jump law is a probability measure."""
        total = math.fsum(a.weight for a in v)
        if abs(total - 1.0) > ATOM_WEIGHT_TOLERANCE:
            raise ValueError(f"atom weights must sum to 1, got {total!r}")
        return v

    def eta(self, u):
        u = np.asarray(u, dtype=float)
        return self.rate * _atom_part(self.atoms, u)

    def decay_class(self):
        return Bounded(bound=2.0 * self.rate)

    def analytic_growth_bound(self):
        return self.rate * _atom_growth(self.atoms)

    def parameters(self):
        return [("rate", repr(self.rate)), ("atoms", _format_atoms(self.atoms))]


class LevyKhintchineExponent(ExponentBase):
    """Gaussian part plus a finite symmetric Levy measure: ``variance u^2 / 2 + sum w_i (1 - cos(u x_i))``."""

    family: Literal["levy_khintchine"] = "levy_khintchine"
    variance: float = Field(..., ge=0)
    atoms: Tuple[Atom, ...] = Field(default_factory=tuple)

    @validator("atoms", always=True)
    def validate_nondegenerate(cls, v, values):
        """At least one of the Gaussian part and the jump part is present."""
        if not v and not values.get("variance"):
            raise ValueError("a Levy-Khintchine exponent needs a Gaussian part or atoms")
        return v

    def eta(self, u):
        u = np.asarray(u, dtype=float)
        return 0.5 * self.variance * u * u + _atom_part(self.atoms, u)

    def decay_class(self):
        if self.variance > 0:
            return ExponentialType(gamma=2.0, c=0.5 * self.variance)
        return Bounded(bound=2.0 * math.fsum(a.weight for a in self.atoms))

    def analytic_growth_bound(self):
        return 0.5 * self.variance + _atom_growth(self.atoms)

    def parameters(self):
        params = [("variance", repr(self.variance))]
        if self.atoms:
            params.append(("atoms", _format_atoms(self.atoms)))
        return params


class GaussianJumpsExponent(ExponentBase):
    """Compound Poisson with centred Gaussian jumps: ``eta(u) = rate * (1 - exp(-jump_variance u^2 / 2))``."""

    family: Literal["gaussian_jumps"] = "gaussian_jumps"
    rate: float = Field(..., gt=0)
    jump_variance: float = Field(..., gt=0)

    def eta(self, u):
        u = np.asarray(u, dtype=float)
        return -self.rate * np.expm1(-0.5 * self.jump_variance * u * u)

    def decay_class(self):
        return Bounded(bound=self.rate)

    def analytic_growth_bound(self):
        s2 = self.jump_variance
        return self.rate * s2 / (s2 + 2.0)

    def bernstein(self, u):
        return -self.rate * np.expm1(-0.5 * self.jump_variance * np.asarray(u, dtype=float))

    @property
    def has_bernstein(self):
        return True

    def parameters(self):
        return [("rate", repr(self.rate)), ("jump_variance", repr(self.jump_variance))]


class ConvolutionExponent(ExponentBase):
    """Convolution of independent parts: exponents add."""

    family: Literal["convolution"] = "convolution"
    parts: Tuple["NegDefExponent", ...] = Field(..., min_length=2)

    def eta(self, u):
        u = np.asarray(u, dtype=float)
        total = np.zeros_like(u)
        for part in self.parts:
            total = total + part.eta(u)
        return total

    def decay_class(self):
        classes = [part.decay_class() for part in self.parts]
        exponential = [c for c in classes if isinstance(c, ExponentialType)]
        if exponential:
            return max(exponential, key=lambda c: (c.gamma, c.c, -c.u0))
        logarithmic = [c for c in classes if isinstance(c, Logarithmic)]
        if logarithmic:
            return Logarithmic(ell=sum(c.ell for c in logarithmic), scale=min(c.scale for c in logarithmic))
        return Bounded(bound=sum(c.bound for c in classes if isinstance(c, Bounded)))

    def bernstein(self, u):
        u = np.asarray(u, dtype=float)
        total = np.zeros_like(u)
        for part in self.parts:
            total = total + part.bernstein(u)
        return total

    @property
    def has_bernstein(self):
        return all(part.has_bernstein for part in self.parts)

    def parameters(self):
        return []


NegDefExponent = Annotated[
    Union[
        GaussianExponent,
        LaplaceExponent,
        StableExponent,
        CauchyExponent,
        RelativisticExponent,
        CompoundPoissonExponent,
        LevyKhintchineExponent,
        GaussianJumpsExponent,
        ConvolutionExponent,
    ],
    Field(discriminator="family"),
]

ConvolutionExponent.model_rebuild()
BernsteinView.model_rebuild()
