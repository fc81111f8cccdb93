"""
Series service: truncation of spectral sums with certified tail bounds.

A term of a spectral sum has the form

    multiplicity * d^w * (1 + kappa)^p * exp(-tau * eta(sqrt(kappa))) * g

with ``|g| <= 1``. For exponential-type exponents ``eta(u) >= c u^gamma`` beyond
``u0``, the excluded terms are dominated by ``∫_{s0}^∞ Q(s) exp(-b s^gamma) ds`` for
a group-specific polynomial ``Q``. On SU(2) and SO(3) each excluded label n is
compared with the integral over ``[n - 1, n]``; on tori each lattice point is
compared with the integral over its unit cube.
"""
import math
from typing import Optional

import numpy as np
import structlog
from numpy.polynomial import Polynomial
from pydantic import BaseModel
from scipy.special import gamma as gamma_fn

from ..config import Settings, get_settings
from ..models.exponent import ExponentialType, NegDefExponent
from ..models.kernel_value import TruncationPolicy
from ..models.spectrum import GroupKind, GroupSpectrum
from ..utils.lattice import sphere_area
from ..utils.series import block_sum, log_stretched_tail
from .spectrum_service import SpectralTerms, SpectrumService

logger = structlog.get_logger(__name__)


class Truncation(BaseModel):
    """Where a sum was cut and what the cut costs."""

    terms: SpectralTerms
    label_count: Optional[int] = None
    max_norm_sq: Optional[int] = None
    tail_bound: Optional[float] = None
    certified: bool = False

    class Config:
        arbitrary_types_allowed = True
        frozen = True


class SeriesService:
    """Chooses cutoffs and sums spectral series deterministically."""

    def __init__(self, spectrum_service: SpectrumService, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        self.spectrum_service = spectrum_service

    def default_policy(self) -> TruncationPolicy:
        return TruncationPolicy(target_tail=self.settings.target_tail, hard_max_terms=self.settings.hard_max_terms)

    def sum(self, values: np.ndarray):
        """Deterministic block sum (fixed block size, pairwise reduction)."""
        return block_sum(values, self.settings.block_size, self.settings.workers)

    # ----------------------------------------------------------------- bounds

    def log_tail_bound(
        self,
        spectrum: GroupSpectrum,
        decay: ExponentialType,
        tau: float,
        cutoff: int,
        dim_power: int,
        sobolev_power: int = 0,
    ) -> float:
        """
        Log of the bound on all terms beyond ``cutoff``.

        ``cutoff`` is the number of summed labels on rank-one groups and the largest
        summed ``|n|^2`` on tori. Returns ``inf`` when the bound does not apply.
        """
        b = tau * decay.c
        if spectrum.kind in (GroupKind.SU2, GroupKind.SO3):
            if cutoff < 1 or cutoff < decay.u0:
                return math.inf
            poly = Polynomial([2.0, 1.0]) ** (dim_power + 2 * sobolev_power)
            if spectrum.kind == GroupKind.SO3:
                poly = Polynomial([3.0, 2.0]) ** dim_power * Polynomial([2.0, 1.0]) ** (2 * sobolev_power)
            return log_stretched_tail(poly, b, decay.gamma, float(cutoff - 1))
        if spectrum.kind == GroupKind.TORUS:
            d = spectrum.rank
            radius = math.sqrt(cutoff + 1.0)
            s0 = radius - math.sqrt(d)
            if s0 < 0 or 2.0 * math.pi * radius < decay.u0:
                return math.inf
            poly = sphere_area(d) * Polynomial([0.5 * math.sqrt(d), 1.0]) ** (d - 1)
            if sobolev_power:
                shifted = Polynomial([math.sqrt(d), 1.0])
                poly = poly * (1.0 + 4.0 * math.pi ** 2 * shifted ** 2) ** sobolev_power
            return log_stretched_tail(poly, b * (2.0 * math.pi) ** decay.gamma, decay.gamma, s0)
        return math.inf

    # ------------------------------------------------------------- truncation

    def truncate(
        self,
        spectrum: GroupSpectrum,
        exponent: NegDefExponent,
        t: float,
        policy: Optional[TruncationPolicy] = None,
        dim_power: int = 2,
        sobolev_power: int = 0,
        coefficient_power: float = 1.0,
        points: bool = False,
    ) -> Truncation:
        """
        Cut a sum of ``mult * d^w (1+kappa)^p c^q * g`` so the certified tail is below the policy's target.

        Generic spectra are summed over their whole table; exponents without an
        exponential-type lower bound are summed over a fixed number of labels.
        Neither is certified.
        """
        policy = policy or self.default_policy()
        tau = t * coefficient_power
        decay = exponent.decay_class()

        if spectrum.kind == GroupKind.GENERIC:
            terms = self.spectrum_service.spectral_terms(spectrum)
            return Truncation(terms=terms, certified=False)

        if not isinstance(decay, ExponentialType) or tau <= 0:
            return self._uncertified(spectrum, points)

        log_target = math.log(policy.target_tail)

        def log_bound(cutoff: int) -> float:
            return self.log_tail_bound(spectrum, decay, tau, cutoff, dim_power, sobolev_power)

        if spectrum.kind == GroupKind.TORUS:
            d = spectrum.rank
            lowest = max(d - 1, int(math.ceil((decay.u0 / (2.0 * math.pi)) ** 2)) - 1, 0)
            cap = self._torus_cap(d, policy.hard_max_terms, points)
        else:
            lowest = max(1, int(math.ceil(decay.u0)))
            cap = policy.hard_max_terms

        cutoff, log_tail = self._search(log_bound, lowest, cap, log_target)
        tail = math.exp(log_tail) if math.isfinite(log_tail) else None
        certified = tail is not None and log_tail <= log_target
        if not certified:
            logger.warning("tail target not reached within term cap", cutoff=cutoff, tail_bound=tail,
                           target=policy.target_tail)

        if spectrum.kind == GroupKind.TORUS:
            terms = self.spectrum_service.spectral_terms(spectrum, max_norm_sq=cutoff, points=points)
            result = Truncation(terms=terms, max_norm_sq=cutoff, tail_bound=tail, certified=certified)
        else:
            terms = self.spectrum_service.spectral_terms(spectrum, label_count=cutoff)
            result = Truncation(terms=terms, label_count=cutoff, tail_bound=tail, certified=certified)
        logger.debug("series truncated", group=spectrum.describe(), cutoff=cutoff, terms=len(terms),
                     tail_bound=tail, certified=certified)
        return result

    @staticmethod
    def _search(log_bound, lowest: int, cap: int, log_target: float):
        """Smallest cutoff in ``[lowest, cap]`` meeting the target; doubling then bisection."""
        lowest = min(lowest, cap)
        value = log_bound(lowest)
        if value <= log_target:
            return lowest, value
        lo, hi = lowest, max(2 * lowest, 1)
        while True:
            if hi >= cap:
                hi = cap
                value = log_bound(hi)
                if value > log_target:
                    return hi, value
                break
            value = log_bound(hi)
            if value <= log_target:
                break
            lo, hi = hi, 2 * hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            mid_value = log_bound(mid)
            if mid_value <= log_target:
                hi, value = mid, mid_value
            else:
                lo = mid
        return hi, value

    @staticmethod
    def _torus_cap(d: int, hard_max_terms: int, points: bool) -> int:
        """Largest ``|n|^2`` bound whose sum stays within the term cap."""
        if not points:
            return hard_max_terms - 1
        ball_volume = math.pi ** (d / 2.0) / gamma_fn(d / 2.0 + 1.0)
        return max(int((hard_max_terms / ball_volume) ** (2.0 / d)), 1)

    def _uncertified(self, spectrum: GroupSpectrum, points: bool) -> Truncation:
        count = self.settings.uncertified_terms
        if spectrum.kind == GroupKind.TORUS:
            bound = min(count, self._torus_cap(spectrum.rank, self.settings.hard_max_terms, points))
            terms = self.spectrum_service.spectral_terms(spectrum, max_norm_sq=bound, points=points)
            return Truncation(terms=terms, max_norm_sq=bound, certified=False)
        terms = self.spectrum_service.spectral_terms(spectrum, label_count=count)
        return Truncation(terms=terms, label_count=count, certified=False)
