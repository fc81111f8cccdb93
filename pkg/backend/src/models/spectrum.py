"""
Spectral data of compact groups: irreps, group spectra, class points and elements.
"""
from enum import Enum
from typing import Iterator, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, validator

UNIT_TOLERANCE = 1e-12


class GroupKind(str, Enum):
    """Supported group families."""

    TORUS = "torus"
    SU2 = "su2"
    SO3 = "so3"
    GENERIC = "generic"


class IrrepDatum(BaseModel):
    """One irreducible representation: label, dimension and Casimir eigenvalue."""

    index: Tuple[int, ...] = Field(..., description="Highest-weight label")
    dim: int = Field(..., ge=1, description="Dimension d_pi")
    casimir: float = Field(..., ge=0, description="Casimir eigenvalue kappa_pi")

    @property
    def is_trivial(self) -> bool:
        return self.casimir == 0.0

    def label(self) -> str:
        return ";".join(str(i) for i in self.index)

    class Config:
        frozen = True


class GroupSpectrum(BaseModel):
    """Enumerable spectrum of a compact group together with its structural constants."""

    kind: GroupKind = Field(..., description="Group family")
    dim: Optional[int] = Field(..., ge=1, description="Group dimension; unknown for generic tables without metadata")
    rank: int = Field(..., ge=1, description="Rank r")
    weyl_order: int = Field(..., ge=1, description="Order of the Weyl group")
    rho_sq: Optional[float] = Field(None, ge=0, description="|rho|^2 in the Casimir normalisation")
    name: str = Field("", description="Display name")
    table: Optional[Tuple[IrrepDatum, ...]] = Field(None, description="Rows of a generic spectrum, sorted by Casimir")

    @validator("table")
    def validate_table(cls, v, values):
        """Only generic spectra carry a table."""
        kind = values.get("kind")
        if kind == GroupKind.GENERIC and not v:
            raise ValueError("generic spectra need a non-empty table")
        if kind != GroupKind.GENERIC and v is not None:
            raise ValueError("built-in spectra are enumerated, not tabulated")
        return v

    @property
    def m(self) -> Optional[float]:
        """Half the number of roots, ``(dim - rank) / 2``."""
        if self.dim is None:
            return None
        return 0.5 * (self.dim - self.rank)

    @property
    def supports_characters(self) -> bool:
        return self.kind != GroupKind.GENERIC

    @property
    def is_abelian(self) -> bool:
        return self.kind == GroupKind.TORUS

    def describe(self) -> str:
        if self.kind == GroupKind.TORUS:
            return f"torus:{self.rank}"
        if self.kind == GroupKind.GENERIC:
            return f"generic:{self.name}" if self.name else "generic"
        return self.kind.value

    @classmethod
    def torus(cls, d: int) -> "GroupSpectrum":
        return cls(kind=GroupKind.TORUS, dim=d, rank=d, weyl_order=1, rho_sq=0.0, name=f"T^{d}")

    @classmethod
    def su2(cls) -> "GroupSpectrum":
        # kappa_n = n(n+2) = (n+1)^2 - |rho|^2
        return cls(kind=GroupKind.SU2, dim=3, rank=1, weyl_order=2, rho_sq=1.0, name="SU(2)")

    @classmethod
    def so3(cls) -> "GroupSpectrum":
        # kappa_n = n(n+1) = (n+1/2)^2 - |rho|^2
        return cls(kind=GroupKind.SO3, dim=3, rank=1, weyl_order=2, rho_sq=0.25, name="SO(3)")

    class Config:
        frozen = True


class IrrepListing(BaseModel):
    """Result of an enumeration, flagged when a generic table ran out before the cutoff."""

    irreps: List[IrrepDatum] = Field(default_factory=list)
    truncated: bool = Field(False, description="The table ended before the requested cutoff")

    def __iter__(self) -> Iterator[IrrepDatum]:  # type: ignore[override]
        return iter(self.irreps)

    def __len__(self) -> int:
        return len(self.irreps)

    def __getitem__(self, item):
        return self.irreps[item]


class ClassPoint(BaseModel):
    """Coordinates of a conjugacy class in the fundamental domain of its group."""

    coordinates: Tuple[float, ...] = Field(..., min_length=1)

    @property
    def angle(self) -> float:
        return self.coordinates[0]

    class Config:
        frozen = True


class GroupElement(BaseModel):
    """A group element: a vector mod 1 on tori, a unit quaternion on SU(2) and SO(3)."""

    kind: GroupKind
    components: Tuple[float, ...]

    @validator("components")
    def validate_components(cls, v, values):
        """Quaternion kinds need four unit-norm components; torus coordinates are reduced mod 1."""
        kind = values.get("kind")
        if kind == GroupKind.GENERIC:
            raise ValueError("generic spectra have no group elements")
        if kind in (GroupKind.SU2, GroupKind.SO3):
            if len(v) != 4:
                raise ValueError("quaternion elements need four components")
            if abs(float(np.linalg.norm(v)) - 1.0) > UNIT_TOLERANCE:
                raise ValueError("quaternion elements must have unit norm")
            return tuple(float(c) for c in v)
        if not v:
            raise ValueError("torus elements need at least one coordinate")
        reduced = np.mod(np.asarray(v, dtype=float), 1.0)
        reduced[reduced >= 1.0] = 0.0
        return tuple(float(c) for c in reduced)

    def array(self) -> np.ndarray:
        return np.asarray(self.components, dtype=float)

    class Config:
        frozen = True
