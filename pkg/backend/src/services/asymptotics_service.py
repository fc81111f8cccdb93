"""
Asymptotics service: closed forms, small-time fits and eigenvalue counting.
"""
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy.integrate import quad
from scipy.special import erfc, gammaln

from ..config import Settings, get_settings
from ..errors import CapabilityError, InvalidInputError
from ..models.asymptotics import (
    ClosedFormValue,
    CountingFunction,
    ExplorationReport,
    KaramataReport,
    PowerLawFit,
)
from ..models.exponent import (
    CauchyExponent,
    ExponentialType,
    GaussianExponent,
    Logarithmic,
    NegDefExponent,
    StableExponent,
)
from ..models.kernel_value import KernelValue, TruncationPolicy
from ..models.measure import CentralMeasure
from ..models.spectrum import GroupKind, GroupSpectrum
from ..utils.lattice import shell_counts, sphere_area
from .exponent_service import ExponentService
from .kernel_service import KernelService
from .measure_service import MeasureService
from .series_service import SeriesService
from .spectrum_service import FOUR_PI_SQ, SpectrumService

logger = structlog.get_logger(__name__)

# Width of the radial partition of unity in the Poisson form
POISSON_WIDTH = 2.5
POISSON_SPAN = 8.0
KARAMATA_TOLERANCE = 0.1
KARAMATA_POINTS = 6
MIN_FIT_SAMPLES = 5


class AsymptoticsService:
    """Small-time behaviour of ``k_t(e)`` and the spectral counting function."""

    def __init__(
        self,
        spectrum_service: SpectrumService,
        exponent_service: ExponentService,
        series_service: SeriesService,
        measure_service: MeasureService,
        kernel_service: KernelService,
        settings: Optional[Settings] = None,
    ):
        self.settings = settings or get_settings()
        self.spectrum_service = spectrum_service
        self.exponent_service = exponent_service
        self.series_service = series_service
        self.measure_service = measure_service
        self.kernel_service = kernel_service

    # ------------------------------------------------------------ closed forms

    @staticmethod
    def torus_cauchy_leading_constant(d: int, sigma: float) -> float:
        """``C`` in ``k_t(e) ~ C t^-d`` for the Cauchy semigroup on the d-torus."""
        return math.exp(gammaln(0.5 * (d + 1)) - 0.5 * (d + 1) * math.log(math.pi)) / sigma ** d

    def torus_cauchy_closed_form(self, d: int, sigma: float, t: float, m_cutoff: float = 60.0) -> ClosedFormValue:
        """
        ``k_t(e)`` for the Cauchy semigroup on the d-torus.

        For d = 1 this is ``coth(pi sigma t)``. For d > 1 the dual lattice sum of
        ``F(r) = C_d a / (a^2 + r^2)^((d+1)/2)`` with ``a = sigma t`` is split by the
        smooth cut-off ``psi(r) = erfc((M - r) / w) / 2``: lattice points carry
        ``F (1 - psi)`` and the remainder ``F psi`` is integrated radially.

        The error estimate adds the lattice remainder beyond the summed ball (bounded by
        cube comparison, ``F (1 - psi)`` being radially decreasing), the far integral
        below the band (at most ``psi`` there since ``F`` has unit mass), both ``quad``
        error outputs, summation rounding and the aliasing of the smooth far part.
        """
        if d < 1:
            raise InvalidInputError("torus dimension must be positive")
        if not (sigma > 0 and t > 0):
            raise InvalidInputError("sigma and t must be positive")
        a = sigma * t
        if d == 1:
            return ClosedFormValue(value=1.0 / math.tanh(math.pi * a), exact=True)

        w = POISSON_WIDTH
        centre = m_cutoff - 6.0 * w
        if centre - POISSON_SPAN * w <= 0:
            raise InvalidInputError(f"m_cutoff must exceed {(6.0 + POISSON_SPAN) * w}")
        log_norm = gammaln(0.5 * (d + 1)) - 0.5 * (d + 1) * math.log(math.pi)
        power = 0.5 * (d + 1)
        area = sphere_area(d)

        def dual(r):
            return math.exp(log_norm) * a / (a * a + r * r) ** power

        def cutoff(r):
            return 0.5 * erfc((centre - r) / w)

        def kept(r):
            return dual(r) * 0.5 * erfc((r - centre) / w)

        outer = centre + POISSON_SPAN * w
        max_norm_sq = int(math.floor(outer * outer))
        counts = shell_counts(d, max_norm_sq)
        k = np.flatnonzero(counts)
        r = np.sqrt(k.astype(float))
        near_terms = counts[k] * kept(r)
        near = float(self.series_service.sum(near_terms))
        rounding = np.finfo(float).eps * math.log2(max(len(near_terms), 2)) * near

        def radial(x):
            return dual(x) * cutoff(x) * x ** (d - 1)

        inner = centre - POISSON_SPAN * w
        band, band_err = quad(radial, inner, outer, limit=200, epsabs=0.0, epsrel=1e-14)
        rest, rest_err = quad(radial, outer, math.inf, limit=200, epsabs=0.0, epsrel=1e-14)
        far = area * (band + rest)

        # unit cubes around the dropped points lie beyond first_dropped - half_diag
        half_diag = 0.5 * math.sqrt(d)
        first_dropped = math.sqrt(max_norm_sq + 1)

        def dominating(x):
            return kept(x - half_diag) * x ** (d - 1)

        tail, tail_err = quad(dominating, first_dropped - half_diag, math.inf, limit=200, epsabs=0.0, epsrel=1e-10)
        truncation = area * (tail + tail_err)
        leakage = float(cutoff(inner))
        quadrature = area * (band_err + rest_err)
        aliasing = (near + far) * math.exp(-(math.pi * w) ** 2)

        error = truncation + leakage + quadrature + rounding + aliasing
        value = near + far
        logger.debug("torus Poisson form", d=d, t=t, near=near, far=far, truncation=truncation,
                     quadrature=quadrature, error_estimate=error)
        return ClosedFormValue(value=value, error_estimate=error, terms_used=int(counts[k].sum()))

    @staticmethod
    def su2_cauchy_comparison_series(sigma: float, t: float) -> float:
        """``sum_{m>=1} m^2 exp(-sigma t m) = x (1 + x) / (1 - x)^3`` with ``x = exp(-sigma t)``."""
        if not (sigma > 0 and t > 0):
            raise InvalidInputError("sigma and t must be positive")
        x = math.exp(-sigma * t)
        one_minus_x = -math.expm1(-sigma * t)
        return x * (1.0 + x) / one_minus_x ** 3

    @staticmethod
    def heat_reference_exponent(sigma: float) -> GaussianExponent:
        """Gaussian exponent ``eta(u) = sigma u^2 / 8`` matching the SU(2) heat reference."""
        return GaussianExponent(variance=0.25 * sigma)

    @staticmethod
    def heat_asymptotic_reference(spectrum: GroupSpectrum, sigma: float, t: float) -> float:
        """``32 sqrt(2) pi^2 (4 pi sigma t)^(-3/2) exp(sigma t / 8)`` on SU(2)."""
        if spectrum.kind != GroupKind.SU2:
            raise CapabilityError("the heat reference is available for SU(2) only")
        if not (sigma > 0 and t > 0):
            raise InvalidInputError("sigma and t must be positive")
        return 32.0 * math.sqrt(2.0) * math.pi ** 2 * (4.0 * math.pi * sigma * t) ** -1.5 * math.exp(sigma * t / 8.0)

    def weyl_trace_form(self, m: CentralMeasure, policy: Optional[TruncationPolicy] = None) -> KernelValue:
        """
        ``k_t(e)`` as a sum over the whole weight lattice of SU(2).

        Weights ``m`` in Z carry ``d = |m|`` and ``|lambda|^2 - |rho|^2 = m^2 - 1``;
        the sum is divided by the Weyl group order.
        """
        spectrum = m.spectrum
        if spectrum.kind != GroupKind.SU2:
            raise CapabilityError("the weight-lattice form is implemented for SU(2) only")
        forced = self.kernel_service.require_density(m)
        truncation = self.series_service.truncate(spectrum, m.exponent, m.t, policy, dim_power=2)
        count = truncation.label_count
        weights = np.concatenate([-np.arange(count, 0, -1), np.arange(1, count + 1)]).astype(float)
        casimir = weights * weights - spectrum.rho_sq
        values = weights ** 2 * self.measure_service.coefficients(m, casimir)
        value = float(self.series_service.sum(values)) / spectrum.weyl_order
        certified = truncation.certified and not forced
        return KernelValue(value=value, terms_used=count, tail_bound=truncation.tail_bound if certified else None,
                           certified=certified)

    # -------------------------------------------------------------------- fits

    def sample_identity_density(
        self,
        spectrum: GroupSpectrum,
        exponent: NegDefExponent,
        window: Optional[Tuple[float, float]] = None,
        samples: Optional[int] = None,
        policy: Optional[TruncationPolicy] = None,
    ) -> List[Tuple[float, float]]:
        """Log-spaced ``(t, k_t(e))`` pairs across the fit window."""
        t_min, t_max = window or (self.settings.fit_t_min, self.settings.fit_t_max)
        count = samples or self.settings.fit_samples
        pairs = []
        for t in np.geomspace(t_min, t_max, count):
            m = self.measure_service.measure(spectrum, exponent, float(t))
            pairs.append((float(t), self.kernel_service.density_at_identity(m, policy).value))
        return pairs

    @staticmethod
    def fit_power_law(samples: Sequence[Tuple[float, float]], window: Optional[Tuple[float, float]] = None) -> PowerLawFit:
        """Least squares for ``log value = log C - p log t``."""
        if window is not None:
            samples = [(t, v) for t, v in samples if window[0] <= t <= window[1]]
        if len(samples) < MIN_FIT_SAMPLES:
            raise InvalidInputError(f"a power-law fit needs at least {MIN_FIT_SAMPLES} samples, got {len(samples)}")
        t = np.array([s[0] for s in samples], dtype=float)
        v = np.array([s[1] for s in samples], dtype=float)
        if np.any(t <= 0) or np.any(v <= 0):
            raise InvalidInputError("power-law fits need positive times and values")
        slope, intercept = np.polyfit(np.log(t), np.log(v), 1)
        residual = float(np.max(np.abs(np.log(v) - (intercept + slope * np.log(t)))))
        fit = PowerLawFit(
            C=float(np.exp(intercept)),
            p=float(-slope),
            residual=residual,
            window=window or (float(t.min()), float(t.max())),
            samples=[(float(a), float(b)) for a, b in samples],
        )
        logger.info("power law fitted", C=fit.C, p=fit.p, residual=fit.residual, samples=len(samples))
        return fit

    def fit_identity_density(self, spectrum: GroupSpectrum, exponent: NegDefExponent,
                             window: Optional[Tuple[float, float]] = None,
                             samples: Optional[int] = None) -> PowerLawFit:
        window = window or (self.settings.fit_t_min, self.settings.fit_t_max)
        return self.fit_power_law(self.sample_identity_density(spectrum, exponent, window, samples), window)

    def stable_exploration(self, spectrum: GroupSpectrum, alpha: float, b: float = 1.0,
                           window: Optional[Tuple[float, float]] = None,
                           samples: Optional[int] = None) -> ExplorationReport:
        """Fit ``k_t(e) ~ C t^-p`` for an alpha-stable exponent next to the guess ``p = dim / alpha``."""
        exponent = StableExponent(b=b, alpha=alpha)
        window = window or (self.settings.fit_t_min, self.settings.fit_t_max)
        pairs = []
        certified = 0
        for t in np.geomspace(window[0], window[1], samples or self.settings.fit_samples):
            m = self.measure_service.measure(spectrum, exponent, float(t))
            kv = self.kernel_service.density_at_identity(m)
            certified += int(kv.certified)
            pairs.append((float(t), kv.value))
        fit = self.fit_power_law(pairs, window)
        conjectured = spectrum.dim / alpha if spectrum.dim is not None else None
        return ExplorationReport(
            group=spectrum.describe(),
            alpha=alpha,
            b=b,
            fit=fit,
            conjectured_p=conjectured,
            certified_samples=certified,
            note="exploratory fit; the power dim/alpha is a conjecture and is not asserted",
        )

    # ---------------------------------------------------------------- counting

    def _casimir_bound(self, e: NegDefExponent, lam: float) -> float:
        """A Casimir value beyond which ``eta(sqrt(kappa)) > lam``."""
        decay = e.decay_class()
        if isinstance(decay, ExponentialType):
            return max(decay.u0 ** 2, (lam / decay.c) ** (2.0 / decay.gamma))
        if isinstance(decay, Logarithmic):
            return float(np.expm1(lam / decay.ell)) / decay.scale
        raise CapabilityError(f"bounded exponent (eta <= {decay.bound!r}): infinitely many eigenvalues may lie below {lam!r}")

    def eigenvalue_counting(self, e: NegDefExponent, spectrum: GroupSpectrum, thresholds: Sequence[float]) -> CountingFunction:
        """``N(lambda) = sum of d^2 over irreps with eta(sqrt(kappa)) <= lambda``."""
        thresholds = [float(x) for x in thresholds]
        if any(x < 0 for x in thresholds) or any(b < a for a, b in zip(thresholds, thresholds[1:])):
            raise InvalidInputError("thresholds must be sorted and non-negative")
        if not thresholds:
            return CountingFunction(thresholds=[], counts=[])
        bound = self._casimir_bound(e, thresholds[-1])
        if not math.isfinite(bound) or math.sqrt(bound) > self.settings.hard_max_terms:
            raise InvalidInputError(f"counting up to {thresholds[-1]!r} needs more than hard_max_terms irreps")
        if spectrum.kind == GroupKind.TORUS:
            terms = self.spectrum_service.spectral_terms(spectrum, max_norm_sq=int(math.floor(bound / FOUR_PI_SQ)) + 1)
        elif spectrum.kind == GroupKind.GENERIC:
            terms = self.spectrum_service.spectral_terms(spectrum)
            if terms.casimir[-1] < bound:
                logger.warning("counting function truncated by the table", table_max=float(terms.casimir[-1]),
                               needed=bound)
        else:
            count = len(self.spectrum_service.enumerate_irreps(spectrum, max_casimir=max(bound, 1.0))) + 1
            terms = self.spectrum_service.spectral_terms(spectrum, label_count=count)
        eigenvalues = np.asarray(e.eta(np.sqrt(terms.casimir)), dtype=float)
        order = np.argsort(eigenvalues, kind="stable")
        cumulative = np.cumsum((terms.multiplicity * terms.dim ** 2)[order])
        positions = np.searchsorted(eigenvalues[order], thresholds, side="right")
        counts = [int(round(cumulative[i - 1])) if i > 0 else 0 for i in positions]
        return CountingFunction(thresholds=thresholds, counts=counts)

    def karamata_check(self, e: NegDefExponent, spectrum: GroupSpectrum, fit: PowerLawFit,
                       lambda_max: float = 400.0) -> KaramataReport:
        """
        Compare ``N(lambda) Gamma(1 + rho) / lambda^rho`` with the fitted amplitude, ``rho = dim / alpha``.

        Converged when the three largest thresholds of the doubling grid are within
        ten percent of ``fit.C``.
        """
        if isinstance(e, StableExponent):
            alpha = e.alpha
        elif isinstance(e, CauchyExponent):
            alpha = 1.0
        else:
            raise CapabilityError("the Tauberian check applies to stable and Cauchy exponents")
        if spectrum.dim is None:
            raise CapabilityError("the Tauberian check needs the group dimension")
        rho = spectrum.dim / alpha
        thresholds = [lambda_max / 2.0 ** j for j in reversed(range(KARAMATA_POINTS))]
        counting = self.eigenvalue_counting(e, spectrum, thresholds)
        ratios = self.tauberian_ratios(thresholds, counting.counts, rho)
        converged = all(abs(r - fit.C) <= KARAMATA_TOLERANCE * fit.C for r in ratios[-3:])
        logger.info("Tauberian check", rho=rho, target=fit.C, ratios=ratios[-3:], converged=converged)
        return KaramataReport(rho=rho, target=fit.C, thresholds=thresholds, ratios=ratios, converged=converged,
                              tolerance=KARAMATA_TOLERANCE)

    @staticmethod
    def tauberian_ratios(thresholds: Sequence[float], counts: Sequence[float], rho: float) -> List[float]:
        """``N(lambda) Gamma(1 + rho) / lambda^rho`` at each threshold."""
        log_gamma = float(gammaln(1.0 + rho))
        return [n * math.exp(log_gamma) / lam ** rho for lam, n in zip(thresholds, counts)]
