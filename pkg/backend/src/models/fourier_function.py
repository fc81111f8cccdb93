"""
Finite Fourier data on a compact group.

A function is stored through its coefficient blocks ``f_hat(pi)`` so that
``f = sum_pi d_pi tr(f_hat(pi) pi)``. A character coefficient ``a`` corresponds to
the block ``(a / d) I`` and the coordinate function ``pi_ij`` to ``E_ji / d``.
"""
import json
from typing import Dict, Iterator, Tuple

import numpy as np
from pydantic import BaseModel, Field, validator

from .spectrum import GroupSpectrum, IrrepDatum

CLASS_TOLERANCE = 1e-12


class FourierBlock(BaseModel):
    """Coefficient block of one irrep."""

    irrep: IrrepDatum
    block: np.ndarray

    @validator("block", pre=True)
    def validate_block(cls, v, values):
        """Blocks are square of the irrep's dimension and become read-only copies."""
        block = np.array(v, dtype=complex)
        irrep = values.get("irrep")
        if irrep is not None and block.shape != (irrep.dim, irrep.dim):
            raise ValueError(f"block for {irrep.index} must be {irrep.dim}x{irrep.dim}, got {block.shape}")
        block.setflags(write=False)
        return block

    @property
    def is_scalar(self) -> bool:
        d = self.irrep.dim
        scalar = np.trace(self.block) / d
        scale = max(1.0, float(np.max(np.abs(self.block))))
        return bool(np.max(np.abs(self.block - scalar * np.eye(d))) <= CLASS_TOLERANCE * scale)

    @property
    def character_coefficient(self) -> complex:
        return complex(np.trace(self.block))

    class Config:
        arbitrary_types_allowed = True
        frozen = True


class FourierFunction(BaseModel):
    """Finitely many coefficient blocks over one spectrum."""

    spectrum: GroupSpectrum
    blocks: Tuple[FourierBlock, ...] = Field(default_factory=tuple)

    @validator("blocks")
    def validate_unique(cls, v):
        """Each irrep appears at most once."""
        seen = set()
        for entry in v:
            if entry.irrep.index in seen:
                raise ValueError(f"duplicate block for irrep {entry.irrep.index}")
            seen.add(entry.irrep.index)
        return tuple(sorted(v, key=lambda e: (e.irrep.casimir, e.irrep.index)))

    @property
    def class_flag(self) -> bool:
        """True when every block is scalar, i.e. ``f`` is a combination of characters."""
        return all(entry.is_scalar for entry in self.blocks)

    def __iter__(self) -> Iterator[FourierBlock]:  # type: ignore[override]
        return iter(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def block_for(self, index: Tuple[int, ...]) -> np.ndarray:
        for entry in self.blocks:
            if entry.irrep.index == tuple(index):
                return entry.block
        raise KeyError(index)

    def map_blocks(self, scale) -> "FourierFunction":
        """New function with each block multiplied by ``scale(irrep)``."""
        return FourierFunction(
            spectrum=self.spectrum,
            blocks=tuple(FourierBlock(irrep=e.irrep, block=scale(e.irrep) * e.block) for e in self.blocks),
        )

    def combine(self, other: "FourierFunction", a: complex = 1.0, b: complex = 1.0) -> "FourierFunction":
        """Linear combination ``a * self + b * other`` on a shared spectrum."""
        merged: Dict[Tuple[int, ...], FourierBlock] = {}
        for coef, func in ((a, self), (b, other)):
            for entry in func.blocks:
                current = merged.get(entry.irrep.index)
                block = coef * entry.block if current is None else current.block + coef * entry.block
                merged[entry.irrep.index] = FourierBlock(irrep=entry.irrep, block=block)
        return FourierFunction(spectrum=self.spectrum, blocks=tuple(merged.values()))

    def to_json(self) -> str:
        """``{irrep_label: [[re, im], ...]}`` with blocks flattened row-major."""
        payload = {
            entry.irrep.label(): [[float(z.real), float(z.imag)] for z in entry.block.ravel()]
            for entry in self.blocks
        }
        return json.dumps(payload)

    class Config:
        frozen = True


class SobolevNorm(BaseModel):
    """``|||f|||_p`` with ``value^2 = sum d (1 + kappa)^p ||f_hat||_HS^2``."""

    p: int = Field(..., ge=0)
    value: float = Field(..., ge=0)


class GeneratorBound(BaseModel):
    """Both sides of ``|||A f|||_{p-2}^2 <= K^2 |||f|||_p^2``."""

    p: int = Field(..., ge=2)
    lhs: float = Field(..., ge=0)
    rhs: float = Field(..., ge=0)
    growth_constant: float = Field(..., gt=0)
    holds: bool
