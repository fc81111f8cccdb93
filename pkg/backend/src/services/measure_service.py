"""
Measure service: Fourier coefficients, regularity verdicts and the zeta function of the spectrum.
"""
import math
from typing import Dict, List, Optional

import numpy as np
import structlog
from scipy.integrate import quad

from ..config import Settings, get_settings
from ..errors import InvalidInputError, PointMassError
from ..models.exponent import Bounded, ExponentialType, Logarithmic, NegDefExponent
from ..models.measure import (
    CentralMeasure,
    Criterion,
    RegularityLevel,
    RegularityVerdict,
    Verdict,
    ZetaReport,
    ZetaVerdict,
)
from ..models.spectrum import GroupKind, GroupSpectrum, IrrepDatum
from ..utils.lattice import shell_counts, sphere_area
from .exponent_service import ExponentService
from .series_service import SeriesService
from .spectrum_service import FOUR_PI_SQ, SpectrumService

logger = structlog.get_logger(__name__)

DEFAULT_ZETA_COUNT = 10_000


class MeasureService:
    """Service for central measures."""

    def __init__(
        self,
        spectrum_service: SpectrumService,
        exponent_service: ExponentService,
        series_service: SeriesService,
        settings: Optional[Settings] = None,
    ):
        self.settings = settings or get_settings()
        self.spectrum_service = spectrum_service
        self.exponent_service = exponent_service
        self.series_service = series_service

    def measure(self, spectrum: GroupSpectrum, exponent: NegDefExponent, t: float) -> CentralMeasure:
        if not math.isfinite(t) or t < 0:
            raise InvalidInputError(f"time must be finite and non-negative, got {t!r}")
        return CentralMeasure(spectrum=spectrum, exponent=exponent, t=t)

    def at_time(self, m: CentralMeasure, t: float) -> CentralMeasure:
        return self.measure(m.spectrum, m.exponent, t)

    def coefficient(self, m: CentralMeasure, irrep: IrrepDatum) -> float:
        """``c_pi(t) = exp(t alpha_pi)``."""
        return float(np.exp(m.t * self.exponent_service.symbol_alpha(m.exponent, irrep.casimir)))

    def coefficients(self, m: CentralMeasure, casimir: np.ndarray) -> np.ndarray:
        return np.exp(m.t * self.exponent_service.symbol_alpha(m.exponent, casimir))

    # ------------------------------------------------------------- regularity

    @staticmethod
    def sobolev_order(spectrum: GroupSpectrum, k: int) -> Optional[int]:
        """Smallest integer ``p > k + dim/2``."""
        if spectrum.dim is None:
            return None
        return int(math.floor(k + spectrum.dim / 2.0)) + 1

    def classify_regularity(self, m: CentralMeasure, level: RegularityLevel, k: Optional[int] = None) -> RegularityVerdict:
        """Decide whether the density is square-integrable, continuous or ``C^k``."""
        if m.t == 0:
            raise PointMassError("t = 0 gives the point mass at the identity, which has no density",
                                 criterion=Criterion.L2_SERIES.value, verdict=Verdict.FAILS.value)
        level = RegularityLevel(level)
        if level == RegularityLevel.CK and (k is None or k < 0):
            raise InvalidInputError("Ck needs a non-negative k")
        k = k if level == RegularityLevel.CK else None

        criterion, q, p = self._criterion(m.spectrum, level, k)
        decay = m.exponent.decay_class()

        if p is None:
            partial, used, _ = self._partial_sum(m, q, 0)
            verdict = self._l2_verdict(m) if level != RegularityLevel.L2 else None
            if verdict is not None and verdict.verdict == Verdict.FAILS:
                return self._verdict(level, k, Verdict.FAILS, criterion, "no square-integrable density: " + verdict.witness,
                                     partial, used)
            return self._verdict(level, k, Verdict.UNDETERMINED, criterion,
                                 "group dimension unknown; the Sobolev order cannot be fixed", partial, used)

        partial, used, tail = self._partial_sum(m, q, p)

        if isinstance(decay, ExponentialType):
            witness = (f"eta(u) >= {decay.c!r} u^{decay.gamma!r} for u >= {decay.u0!r}; "
                       "comparison series with stretched-exponential terms converges")
            return self._verdict(level, k, Verdict.HOLDS, criterion, witness, partial, used, tail)

        if level == RegularityLevel.L2:
            return self._non_exponential_l2(m, decay, criterion, partial, used)

        l2 = self._non_exponential_l2(m, decay, Criterion.L2_SERIES, partial, used)
        if l2.verdict == Verdict.FAILS:
            return self._verdict(level, k, Verdict.FAILS, criterion, "no square-integrable density: " + l2.witness,
                                 partial, used)
        if isinstance(decay, Logarithmic) and self._logarithmic_condition(m, decay, q, p):
            return self._verdict(level, k, Verdict.HOLDS, criterion, self._log_holds_witness(m, decay, q, p),
                                 partial, used)
        return self._verdict(level, k, Verdict.UNDETERMINED, criterion,
                             "density is square-integrable but the sufficient series condition is not met",
                             partial, used)

    def _l2_verdict(self, m: CentralMeasure) -> Optional[RegularityVerdict]:
        decay = m.exponent.decay_class()
        if isinstance(decay, ExponentialType):
            return None
        partial, used, _ = self._partial_sum(m, 2.0, 0)
        return self._non_exponential_l2(m, decay, Criterion.L2_SERIES, partial, used)

    def _non_exponential_l2(self, m: CentralMeasure, decay, criterion: Criterion, partial: float,
                            used: int) -> RegularityVerdict:
        level = RegularityLevel.L2
        if isinstance(decay, Bounded):
            floor = math.exp(-2.0 * m.t * decay.bound)
            witness = f"eta <= {decay.bound!r}, so every term is at least exp(-2 t sup eta) = {floor!r}"
            return self._verdict(level, None, Verdict.FAILS, criterion, witness, partial, used)

        if m.spectrum.m is not None and self._logarithmic_condition(m, decay, 2.0, 0):
            return self._verdict(level, None, Verdict.HOLDS, criterion, self._log_holds_witness(m, decay, 2.0, 0),
                                 partial, used)

        if m.spectrum.kind != GroupKind.GENERIC:
            growth = m.spectrum.m + 0.5 * m.spectrum.rank - 2.0 * m.t * decay.ell
            witness = (f"terms grow like kappa^(m - 2 t ell) on a spectrum of density kappa^(r/2 - 1); "
                       f"m + r/2 - 2 t ell = {growth!r} >= 0, so partial sums are unbounded")
            return self._verdict(level, None, Verdict.FAILS, criterion, witness, partial, used)

        return self._term_test(m, criterion, partial, used)

    def _term_test(self, m: CentralMeasure, criterion: Criterion, partial: float, used: int) -> RegularityVerdict:
        """Fails when the terms of a generic table do not tend to zero."""
        terms = self.spectrum_service.spectral_terms(m.spectrum)
        values = terms.multiplicity * terms.dim ** 2 * self.coefficients(m, terms.casimir) ** 2
        kappa_max = float(terms.casimir[-1])
        upper = values[terms.casimir >= 0.5 * kappa_max]
        quarters = [float(np.mean(chunk)) for chunk in np.array_split(values, 4) if chunk.size]
        floor = self.settings.term_floor
        if upper.size and float(upper.min()) >= floor and all(b >= a for a, b in zip(quarters, quarters[1:])):
            witness = (f"terms d^2 c^2 stay >= {float(upper.min())!r} (floor {floor!r}) over the upper half "
                       f"of the table and their quarter averages {quarters!r} do not decrease")
            return self._verdict(RegularityLevel.L2, None, Verdict.FAILS, criterion, witness, partial, used)
        return self._verdict(RegularityLevel.L2, None, Verdict.UNDETERMINED, criterion,
                             "finite table: neither the growth condition nor the term test is conclusive",
                             partial, used)

    @staticmethod
    def _logarithmic_condition(m: CentralMeasure, decay: Logarithmic, q: float, p: int) -> bool:
        """``m + p + r/2 < t q ell``: terms decay faster than the spectrum grows."""
        if m.spectrum.m is None:
            return False
        return m.spectrum.m + p + 0.5 * m.spectrum.rank < m.t * q * decay.ell

    @staticmethod
    def _log_holds_witness(m: CentralMeasure, decay: Logarithmic, q: float, p: int) -> str:
        lhs = m.spectrum.m + p + 0.5 * m.spectrum.rank
        return f"logarithmic exponent: m + p + r/2 = {lhs!r} < t q ell = {m.t * q * decay.ell!r}"

    def _criterion(self, spectrum: GroupSpectrum, level: RegularityLevel, k: Optional[int]):
        if level == RegularityLevel.L2:
            return Criterion.L2_SERIES, 2.0, 0
        if level == RegularityLevel.C0:
            return Criterion.SUP_SERIES, 1.0, 0
        return Criterion.SOBOLEV_SERIES, 2.0, self.sobolev_order(spectrum, k)

    def _partial_sum(self, m: CentralMeasure, q: float, p: int):
        """Partial sum of ``sum mult d^2 (1 + kappa)^p c^q``, its term count and tail bound."""
        truncation = self.series_service.truncate(
            m.spectrum, m.exponent, m.t, dim_power=2, sobolev_power=p, coefficient_power=q,
        )
        terms = truncation.terms
        values = terms.multiplicity * terms.dim ** 2 * (1.0 + terms.casimir) ** p * self.coefficients(m, terms.casimir) ** q
        return float(self.series_service.sum(values)), int(terms.multiplicity.sum()), truncation.tail_bound

    @staticmethod
    def _verdict(level, k, verdict, criterion, witness, partial, used, tail=None) -> RegularityVerdict:
        result = RegularityVerdict(level=level, k=k, verdict=verdict, criterion=criterion, witness=witness,
                                   partial_sum=partial, terms_used=used, tail_bound=tail)
        logger.info("regularity classified", level=result.level_name(), verdict=verdict.value,
                    criterion=criterion.value)
        return result

    def regularity_report(self, m: CentralMeasure, k_max: int = 10) -> Dict[str, List[dict]]:
        """L2, C0 and every Ck up to ``k_max`` in one document."""
        verdicts = [self.classify_regularity(m, RegularityLevel.L2), self.classify_regularity(m, RegularityLevel.C0)]
        verdicts += [self.classify_regularity(m, RegularityLevel.CK, k) for k in range(k_max + 1)]
        return {"verdicts": [v.to_dict() for v in verdicts]}

    # ------------------------------------------------------------------- zeta

    def sugiura_zeta(
        self,
        spectrum: GroupSpectrum,
        s: float,
        max_count: Optional[int] = None,
        max_casimir: Optional[float] = None,
    ) -> ZetaReport:
        """
        Partial sum of ``sum kappa^-s`` over non-trivial irreps.

        The verdict is analytic: the series converges exactly when ``2s > rank``.
        """
        if max_count is None and max_casimir is None:
            max_count = DEFAULT_ZETA_COUNT
        if s <= 0:
            verdict = ZetaVerdict.DIVERGES
        else:
            verdict = ZetaVerdict.CONVERGES if 2.0 * s > spectrum.rank else ZetaVerdict.DIVERGES

        truncated = False
        tail: Optional[float] = None
        if spectrum.kind == GroupKind.TORUS:
            bound = self._torus_zeta_bound(spectrum.rank, max_count, max_casimir)
            terms = self.spectrum_service.spectral_terms(spectrum, max_norm_sq=bound)
        elif spectrum.kind == GroupKind.GENERIC:
            listing = self.spectrum_service.enumerate_irreps(spectrum, max_casimir=max_casimir, max_count=max_count)
            truncated = listing.truncated
            terms = self.spectrum_service.spectral_terms(spectrum)
            keep = len(listing)
            terms = terms.model_copy(update={
                "casimir": terms.casimir[:keep], "dim": terms.dim[:keep],
                "multiplicity": terms.multiplicity[:keep], "labels": terms.labels[:keep],
            })
            bound = None
        else:
            count = max_count
            if count is None:
                count = len(self.spectrum_service.enumerate_irreps(spectrum, max_casimir=max_casimir))
            terms = self.spectrum_service.spectral_terms(spectrum, label_count=count)
            bound = count

        nontrivial = terms.casimir > 0
        values = terms.multiplicity[nontrivial] * terms.casimir[nontrivial] ** (-s)
        partial = float(self.series_service.sum(values))

        if verdict == ZetaVerdict.CONVERGES and bound is not None:
            tail = self._zeta_tail(spectrum, s, bound)
        return ZetaReport(s=s, partial_sum=partial, verdict=verdict, terms_used=int(terms.multiplicity[nontrivial].sum()),
                          tail_bound=tail, truncated=truncated)

    def _torus_zeta_bound(self, d: int, max_count: Optional[int], max_casimir: Optional[float]) -> int:
        if max_casimir is not None:
            return int(math.floor(max_casimir / FOUR_PI_SQ))
        bound = 1
        while int(np.sum(shell_counts(d, bound))) < max_count:
            bound *= 2
        counts = np.cumsum(shell_counts(d, bound))
        return int(np.searchsorted(counts, max_count))

    @staticmethod
    def _zeta_tail(spectrum: GroupSpectrum, s: float, bound: int) -> Optional[float]:
        """Integral comparison for the excluded terms."""
        if spectrum.kind in (GroupKind.SU2, GroupKind.SO3):
            # kappa_n >= n^2 and sum_{n >= N} n^-2s <= ∫_{N-1}^∞ x^-2s dx
            if bound < 2:
                return None
            return (bound - 1.0) ** (1.0 - 2.0 * s) / (2.0 * s - 1.0)
        d = spectrum.rank
        s0 = math.sqrt(bound + 1.0) - math.sqrt(d)
        if s0 <= 0:
            return None
        value, _ = quad(lambda x: (2.0 * math.pi * x) ** (-2.0 * s) * (x + 0.5 * math.sqrt(d)) ** (d - 1), s0, math.inf)
        return sphere_area(d) * value
