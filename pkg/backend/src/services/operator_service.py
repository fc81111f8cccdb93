"""
Operator service: the semigroup, its generator and resolvent as Fourier multipliers.
"""
import json
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import structlog

from ..config import Settings, get_settings
from ..errors import CapabilityError, InvalidInputError, SpectrumMismatchError
from ..models.exponent import NegDefExponent
from ..models.fourier_function import FourierBlock, FourierFunction, GeneratorBound, SobolevNorm
from ..models.measure import CentralMeasure
from ..models.spectrum import ClassPoint, GroupKind, GroupSpectrum, IrrepDatum
from .exponent_service import ExponentService
from .measure_service import MeasureService
from .spectrum_service import SpectrumService

logger = structlog.get_logger(__name__)


class OperatorService:
    """Applies diagonal symbols blockwise to finite Fourier data."""

    def __init__(
        self,
        spectrum_service: SpectrumService,
        exponent_service: ExponentService,
        measure_service: MeasureService,
        settings: Optional[Settings] = None,
    ):
        self.settings = settings or get_settings()
        self.spectrum_service = spectrum_service
        self.exponent_service = exponent_service
        self.measure_service = measure_service

    # ------------------------------------------------------------ construction

    def character_function(self, spectrum: GroupSpectrum, coefficients: Mapping[Tuple[int, ...], complex]) -> FourierFunction:
        """``f = sum a_pi chi_pi``: the block of ``pi`` is ``(a_pi / d_pi) I``."""
        blocks = []
        for index, a in coefficients.items():
            irrep = self.spectrum_service.irrep(spectrum, index)
            blocks.append(FourierBlock(irrep=irrep, block=(a / irrep.dim) * np.eye(irrep.dim)))
        return FourierFunction(spectrum=spectrum, blocks=tuple(blocks))

    def coordinate_function(self, spectrum: GroupSpectrum, index: Tuple[int, ...], i: int, j: int) -> FourierFunction:
        """The matrix coefficient ``pi_ij``, whose only block is ``E_ji / d``."""
        irrep = self.spectrum_service.irrep(spectrum, index)
        if not (0 <= i < irrep.dim and 0 <= j < irrep.dim):
            raise InvalidInputError(f"matrix entry ({i}, {j}) outside a {irrep.dim}-dimensional irrep")
        block = np.zeros((irrep.dim, irrep.dim), dtype=complex)
        block[j, i] = 1.0 / irrep.dim
        return FourierFunction(spectrum=spectrum, blocks=(FourierBlock(irrep=irrep, block=block),))

    def random_function(self, spectrum: GroupSpectrum, count: int, rng: np.random.Generator,
                        class_only: bool = False) -> FourierFunction:
        """Random blocks on the ``count`` lowest irreps."""
        irreps = self.spectrum_service.enumerate_irreps(spectrum, max_count=count)
        blocks = []
        for irrep in irreps:
            if class_only:
                a = complex(rng.standard_normal(), rng.standard_normal())
                block = (a / irrep.dim) * np.eye(irrep.dim)
            else:
                shape = (irrep.dim, irrep.dim)
                block = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            blocks.append(FourierBlock(irrep=irrep, block=block))
        return FourierFunction(spectrum=spectrum, blocks=tuple(blocks))

    def from_json(self, spectrum: GroupSpectrum, text: str) -> FourierFunction:
        """Inverse of :meth:`FourierFunction.to_json`."""
        try:
            payload: Dict[str, List[List[float]]] = json.loads(text)
        except json.JSONDecodeError as e:
            raise InvalidInputError(f"Fourier data is not valid JSON: {e.msg}")
        blocks = []
        for label, entries in payload.items():
            try:
                index = tuple(int(x) for x in label.split(";"))
            except ValueError:
                raise InvalidInputError(f"bad irrep label {label!r}")
            irrep = self.spectrum_service.irrep(spectrum, index)
            values = np.array([complex(re, im) for re, im in entries])
            if values.size != irrep.dim ** 2:
                raise InvalidInputError(f"irrep {label} needs {irrep.dim ** 2} entries, got {values.size}")
            blocks.append(FourierBlock(irrep=irrep, block=values.reshape(irrep.dim, irrep.dim)))
        return FourierFunction(spectrum=spectrum, blocks=tuple(blocks))

    # -------------------------------------------------------------- multipliers

    def _alpha(self, e: NegDefExponent, irrep: IrrepDatum) -> float:
        return self.exponent_service.symbol_alpha(e, irrep.casimir)

    def apply_semigroup(self, m: CentralMeasure, f: FourierFunction) -> FourierFunction:
        """``T_t f``: each block times ``exp(t alpha)``."""
        if f.spectrum != m.spectrum:
            raise SpectrumMismatchError("function and measure live on different spectra")
        return f.map_blocks(lambda irrep: self.measure_service.coefficient(m, irrep))

    def apply_generator(self, e: NegDefExponent, f: FourierFunction) -> FourierFunction:
        """``A f``: each block times ``alpha = -eta(sqrt(kappa))``."""
        return f.map_blocks(lambda irrep: self._alpha(e, irrep))

    def apply_resolvent(self, e: NegDefExponent, lam: float, f: FourierFunction) -> FourierFunction:
        """``(lambda - A)^-1 f``."""
        if not lam > 0:
            raise InvalidInputError(f"resolvent needs lambda > 0, got {lam!r}")
        return f.map_blocks(lambda irrep: 1.0 / (lam - self._alpha(e, irrep)))

    def eigencomponents(self, f: FourierFunction) -> List[FourierFunction]:
        """``f`` split into single-irrep pieces, each an eigenvector of every multiplier."""
        return [FourierFunction(spectrum=f.spectrum, blocks=(entry,)) for entry in f]

    # ------------------------------------------------------------------- norms

    def sobolev_norm(self, f: FourierFunction, p: int) -> SobolevNorm:
        """``|||f|||_p^2 = sum d (1 + kappa)^p tr(f_hat f_hat^*)``."""
        if p < 0:
            raise InvalidInputError("Sobolev order must be non-negative")
        total = 0.0
        for entry in f:
            hs = float(np.sum(np.abs(entry.block) ** 2))
            total += entry.irrep.dim * (1.0 + entry.irrep.casimir) ** p * hs
        return SobolevNorm(p=p, value=float(np.sqrt(total)))

    def generator_bound_check(self, e: NegDefExponent, f: FourierFunction, p: int) -> GeneratorBound:
        """
        Compare ``|||A f|||_{p-2}^2`` with ``K^2 |||f|||_p^2``.

        ``K`` is the growth constant of ``eta(u) <= K (1 + u^2)``.
        """
        if p < 2:
            raise InvalidInputError("the generator bound needs p >= 2")
        growth = self.exponent_service.growth_bound(e)
        lhs = self.sobolev_norm(self.apply_generator(e, f), p - 2).value ** 2
        rhs = growth ** 2 * self.sobolev_norm(f, p).value ** 2
        holds = lhs <= rhs * (1.0 + 1e-12)
        if not holds:
            logger.error("generator bound violated", family=e.family, p=p, lhs=lhs, rhs=rhs)
        return GeneratorBound(p=p, lhs=lhs, rhs=rhs, growth_constant=growth, holds=holds)

    # --------------------------------------------------------------- synthesis

    def synthesize_class(self, f: FourierFunction, point: ClassPoint) -> complex:
        """``sum a_pi chi_pi(point)`` for class data."""
        return complex(self.synthesize_class_grid(f, [point])[0])

    def synthesize_class_grid(self, f: FourierFunction, points: Sequence[ClassPoint]) -> np.ndarray:
        if not f.class_flag:
            raise CapabilityError("only combinations of characters can be evaluated pointwise")
        if not len(f):
            return np.zeros(len(points), dtype=complex)
        spectrum = f.spectrum
        coefficients = np.array([entry.character_coefficient for entry in f])
        if not spectrum.supports_characters:
            if any(any(c != 0.0 for c in p.coordinates) for p in points):
                raise CapabilityError("generic spectra cannot evaluate characters away from the identity")
            dims = np.array([entry.irrep.dim for entry in f], dtype=float)
            return np.full(len(points), complex(np.sum(coefficients * dims)))
        labels = np.array([entry.irrep.index for entry in f], dtype=np.int64)
        if spectrum.kind != GroupKind.TORUS:
            labels = labels[:, 0]
        coords = np.array([p.coordinates for p in points], dtype=float)
        return self.spectrum_service.characters(spectrum, labels, coords) @ coefficients
