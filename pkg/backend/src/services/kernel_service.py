"""
Kernel service: densities, transition kernels, traces and quadrature checks.
"""
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog

from ..config import Settings, get_settings
from ..errors import CapabilityError, DivergentSeriesError, PointMassError, RefusalError, SpectrumMismatchError
from ..models.exponent import Bounded
from ..models.kernel_value import KernelValue, TruncationPolicy
from ..models.measure import CentralMeasure, Criterion, RegularityLevel, Verdict
from ..models.spectrum import ClassPoint, GroupElement, GroupKind
from ..utils import quaternion
from ..utils.quadrature import gauss_legendre, sobol_quaternions
from ..utils.series import block_sum_rows
from .measure_service import MeasureService
from .series_service import SeriesService, Truncation
from .spectrum_service import SpectrumService

logger = structlog.get_logger(__name__)

CONJUGATION_MODES = ("gauss", "sobol")


class KernelService:
    """Evaluates ``k_t``, ``h_t`` and the traces of the Hunt semigroup."""

    def __init__(
        self,
        spectrum_service: SpectrumService,
        series_service: SeriesService,
        measure_service: MeasureService,
        settings: Optional[Settings] = None,
    ):
        self.settings = settings or get_settings()
        self.spectrum_service = spectrum_service
        self.series_service = series_service
        self.measure_service = measure_service

    # ---------------------------------------------------------------- gating

    def require_density(self, m: CentralMeasure, force: bool = False) -> bool:
        """
        Check that ``k_t`` is continuous before pointwise evaluation.

        Returns True when evaluation goes ahead only because ``force`` was given;
        such values are never certified.
        """
        if m.t == 0:
            raise PointMassError("t = 0 gives the point mass at the identity, which has no density",
                                 criterion=Criterion.SUP_SERIES.value, verdict=Verdict.FAILS.value)
        verdict = self.measure_service.classify_regularity(m, RegularityLevel.C0)
        if verdict.verdict == Verdict.HOLDS:
            return False
        if force:
            logger.warning("continuity not established, evaluating uncertified", verdict=verdict.verdict.value,
                           criterion=verdict.criterion.value)
            return True
        logger.warning("pointwise evaluation refused", verdict=verdict.verdict.value,
                       criterion=verdict.criterion.value)
        raise RefusalError(
            f"continuity of the density is {verdict.verdict.value.lower()} ({verdict.criterion.formula}): "
            f"{verdict.witness}",
            criterion=verdict.criterion.value,
            verdict=verdict.verdict.value,
        )

    def _require_square_integrable(self, m: CentralMeasure) -> None:
        if m.t == 0:
            raise PointMassError("t = 0 gives the point mass at the identity, which has no density",
                                 criterion=Criterion.L2_SERIES.value, verdict=Verdict.FAILS.value)
        verdict = self.measure_service.classify_regularity(m, RegularityLevel.L2)
        if verdict.verdict != Verdict.HOLDS:
            raise RefusalError(f"density is not known to be square-integrable: {verdict.witness}",
                               criterion=verdict.criterion.value, verdict=verdict.verdict.value)

    @staticmethod
    def _require_convergent_trace(m: CentralMeasure) -> None:
        if m.t == 0:
            raise PointMassError("the trace at t = 0 is the dimension of an infinite-dimensional space",
                                 criterion=Criterion.L2_SERIES.value, verdict=Verdict.FAILS.value)
        decay = m.exponent.decay_class()
        if isinstance(decay, Bounded):
            raise DivergentSeriesError(
                f"bounded exponent (eta <= {decay.bound!r}): trace terms stay above exp(-t sup eta)",
                criterion=Criterion.L2_SERIES.value, verdict=Verdict.FAILS.value,
            )

    # -------------------------------------------------------------- densities

    def _identity_sum(self, m: CentralMeasure, policy: Optional[TruncationPolicy], dim_power: int,
                      forced: bool = False) -> KernelValue:
        """``sum mult d^w c`` over the identity class."""
        truncation = self.series_service.truncate(m.spectrum, m.exponent, m.t, policy, dim_power=dim_power)
        terms = truncation.terms
        c = self.measure_service.coefficients(m, terms.casimir)
        value = float(self.series_service.sum(terms.multiplicity * terms.dim ** dim_power * c))
        return self._kernel_value(value, truncation, forced)

    @staticmethod
    def _kernel_value(value: float, truncation: Truncation, forced: bool) -> KernelValue:
        certified = truncation.certified and not forced
        return KernelValue(
            value=value,
            terms_used=int(truncation.terms.multiplicity.sum()),
            tail_bound=truncation.tail_bound if certified else None,
            certified=certified,
        )

    def density_at_identity(self, m: CentralMeasure, policy: Optional[TruncationPolicy] = None,
                            force: bool = False) -> KernelValue:
        """``k_t(e) = sum d^2 exp(t alpha)``."""
        forced = self.require_density(m, force)
        result = self._identity_sum(m, policy, dim_power=2, forced=forced)
        logger.info("density at identity", group=m.spectrum.describe(), family=m.exponent.family, t=m.t,
                    terms=result.terms_used, tail_bound=result.tail_bound, certified=result.certified)
        return result

    def density_at(self, m: CentralMeasure, point: ClassPoint, policy: Optional[TruncationPolicy] = None,
                   force: bool = False) -> KernelValue:
        """``k_t`` at a class point."""
        if not m.spectrum.supports_characters:
            if any(c != 0.0 for c in point.coordinates):
                raise CapabilityError("generic spectra cannot evaluate characters away from the identity")
            return self.density_at_identity(m, policy, force)
        return self.density_on_grid(m, [point], policy, force)[0]

    def density_on_grid(self, m: CentralMeasure, points: Sequence[ClassPoint],
                        policy: Optional[TruncationPolicy] = None, force: bool = False) -> List[KernelValue]:
        """``k_t`` at each class point; one truncation serves the whole grid."""
        if not m.spectrum.supports_characters:
            return [self.density_at(m, p, policy, force) for p in points]
        forced = self.require_density(m, force)
        truncation = self._pointwise_truncation(m, policy)
        coords = np.array([p.coordinates for p in points], dtype=float)
        values = self._density_values(m, truncation, coords)
        results = [self._kernel_value(float(v), truncation, forced) for v in values]
        logger.info("density evaluated", group=m.spectrum.describe(), family=m.exponent.family, t=m.t,
                    points=len(results), terms=int(truncation.terms.multiplicity.sum()),
                    certified=not forced and truncation.certified)
        return results

    def _pointwise_truncation(self, m: CentralMeasure, policy: Optional[TruncationPolicy]) -> Truncation:
        # |chi| <= d, so the d^2 tail also bounds the character sum
        points = m.spectrum.kind == GroupKind.TORUS
        return self.series_service.truncate(m.spectrum, m.exponent, m.t, policy, dim_power=2, points=points)

    def _density_values(self, m: CentralMeasure, truncation: Truncation, coords: np.ndarray) -> np.ndarray:
        terms = truncation.terms
        weights = terms.multiplicity * terms.dim * self.measure_service.coefficients(m, terms.casimir)
        chars = self.spectrum_service.characters(m.spectrum, terms.labels, coords).real
        return block_sum_rows(chars * weights[None, :], self.settings.block_size)

    def transition_kernel(self, m: CentralMeasure, sigma: GroupElement, rho: GroupElement,
                          policy: Optional[TruncationPolicy] = None, force: bool = False) -> KernelValue:
        """``h_t(sigma, rho) = k_t(sigma^-1 rho)``."""
        g = self.spectrum_service.multiply(self.spectrum_service.invert(sigma), rho)
        return self.density_at(m, self.spectrum_service.class_of(g), policy, force)

    # ------------------------------------------------------------------ traces

    def trace_central(self, m: CentralMeasure, policy: Optional[TruncationPolicy] = None) -> KernelValue:
        """Trace of ``T_t`` on class functions: ``sum exp(t alpha)``."""
        self._require_convergent_trace(m)
        result = self._identity_sum(m, policy, dim_power=0)
        logger.info("central trace", group=m.spectrum.describe(), t=m.t, value=result.value,
                    certified=result.certified)
        return result

    def trace_full(self, m: CentralMeasure, policy: Optional[TruncationPolicy] = None) -> KernelValue:
        """Trace of ``T_t`` on ``L^2(G)``: ``sum d^2 exp(t alpha)``, the same sum as ``k_t(e)``."""
        self._require_convergent_trace(m)
        l2 = self.measure_service.classify_regularity(m, RegularityLevel.L2)
        if l2.verdict == Verdict.FAILS:
            raise DivergentSeriesError(f"full trace diverges: {l2.witness}", criterion=l2.criterion.value,
                                       verdict=l2.verdict.value)
        result = self._identity_sum(m, policy, dim_power=2)
        logger.info("full trace", group=m.spectrum.describe(), t=m.t, value=result.value,
                    certified=result.certified)
        return result

    def conjugation_average(self, m: CentralMeasure, quadrature_order: Optional[int] = None,
                            mode: str = "gauss") -> float:
        """
        ``∫∫ k_t(rho^-1 g rho g^-1) dg drho`` by quadrature.

        ``g`` runs over Weyl-weighted Gauss-Legendre class nodes. In ``gauss`` mode the
        conjugated element ``rho^-1 g rho`` is a rotation by the same angle about a
        uniformly distributed axis, integrated over the axis' z-component; ``sobol``
        mode samples ``rho`` from a scrambled Sobol sequence with a fixed seed.
        """
        if mode not in CONJUGATION_MODES:
            raise CapabilityError(f"unknown conjugation mode {mode!r}; expected one of {', '.join(CONJUGATION_MODES)}")
        spectrum = m.spectrum
        if spectrum.kind == GroupKind.GENERIC:
            raise CapabilityError("generic spectra carry no group structure for the conjugation average")
        if spectrum.kind == GroupKind.TORUS:
            # commuting arguments: the integrand is k_t(e) everywhere
            return self.density_at_identity(m).value

        self.require_density(m)
        order = quadrature_order or self.settings.conjugator_order
        angles, weights = self.spectrum_service.weyl_quadrature(spectrum, order)
        g = self.spectrum_service.class_representative(spectrum, angles[:, 0])
        g_inv = quaternion.conjugate(g)

        if mode == "gauss":
            x, axis_weights = gauss_legendre(order, -1.0, 1.0)
            axis_weights = 0.5 * axis_weights
            axes = np.stack([np.sqrt(1.0 - x * x), np.zeros_like(x), x], axis=-1)
            half = angles[:, 0] if spectrum.kind == GroupKind.SU2 else 0.5 * angles[:, 0]
            conjugated = quaternion.from_axis_angle(axes[None, :, :], half[:, None])
        else:
            rho = sobol_quaternions(self.settings.conjugator_samples_log2, self.settings.conjugator_seed)
            axis_weights = np.full(len(rho), 1.0 / len(rho))
            conjugated = quaternion.multiply(
                quaternion.multiply(quaternion.conjugate(rho)[None, :, :], g[:, None, :]), rho[None, :, :]
            )

        product = quaternion.multiply(conjugated, g_inv[:, None, :])
        classes = self.spectrum_service.class_angles(spectrum, product)
        truncation = self._pointwise_truncation(m, None)
        values = self._density_values(m, truncation, classes.reshape(-1, 1)).reshape(classes.shape)
        result = float(weights @ values @ axis_weights)
        logger.info("conjugation average", group=spectrum.describe(), t=m.t, order=order, mode=mode, value=result)
        return result

    # ------------------------------------------------------------ integration

    def normalization(self, m: CentralMeasure, quadrature_order: Optional[int] = None) -> float:
        """Haar integral of ``k_t`` by Weyl quadrature; equals 1 for a probability density."""
        self._require_square_integrable(m)
        self.require_density(m)
        nodes, weights = self.spectrum_service.weyl_quadrature(m.spectrum, quadrature_order)
        values = self._density_values(m, self._pointwise_truncation(m, None), nodes)
        return float(weights @ values)

    def plancherel_product(self, m1: CentralMeasure, m2: CentralMeasure,
                           policy: Optional[TruncationPolicy] = None) -> KernelValue:
        """``<k_s, k_t> = sum d^2 c(s) c(t)``; the series of ``k_{s+t}(e)``."""
        if m1.spectrum != m2.spectrum or m1.exponent != m2.exponent:
            raise SpectrumMismatchError("Plancherel product needs the same spectrum and exponent")
        self._require_square_integrable(m1)
        self._require_square_integrable(m2)
        total = m1.at_time(m1.t + m2.t)
        truncation = self.series_service.truncate(total.spectrum, total.exponent, total.t, policy, dim_power=2)
        terms = truncation.terms
        c1 = self.measure_service.coefficients(m1, terms.casimir)
        c2 = self.measure_service.coefficients(m2, terms.casimir)
        value = float(self.series_service.sum(terms.multiplicity * terms.dim ** 2 * c1 * c2))
        return self._kernel_value(value, truncation, forced=False)

    def inner_product_quadrature(self, m1: CentralMeasure, m2: CentralMeasure,
                                 quadrature_order: Optional[int] = None) -> float:
        """``∫ k_s k_t`` over class coordinates, independent of the Plancherel series."""
        if m1.spectrum != m2.spectrum:
            raise SpectrumMismatchError("quadrature inner product needs a shared spectrum")
        self.require_density(m1)
        self.require_density(m2)
        nodes, weights = self.spectrum_service.weyl_quadrature(m1.spectrum, quadrature_order)
        v1 = self._density_values(m1, self._pointwise_truncation(m1, None), nodes)
        v2 = self._density_values(m2, self._pointwise_truncation(m2, None), nodes)
        return float(weights @ (v1 * v2))

    # ------------------------------------------------------------------ tables

    def kernel_table(self, measures: Sequence[CentralMeasure], points: Sequence[ClassPoint],
                     policy: Optional[TruncationPolicy] = None,
                     force: bool = False) -> List[Tuple]:
        """Rows ``(t, coords..., value, tail_bound, certified)``, time-major."""
        rows: List[Tuple] = []
        for m in measures:
            for point, kv in zip(points, self.density_on_grid(m, points, policy, force)):
                rows.append((m.t, *point.coordinates, kv.value, kv.tail_text, kv.certified))
        return rows
