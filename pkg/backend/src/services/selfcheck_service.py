"""
Self-check service: named property checks with timing.
"""
import math
import time
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, Field

from ..config import Settings, get_settings
from ..errors import InvalidInputError
from ..models.exponent import (
    CauchyExponent,
    GaussianExponent,
    LaplaceExponent,
    RelativisticExponent,
    StableExponent,
)
from ..models.measure import RegularityLevel, Verdict
from ..models.spectrum import GroupSpectrum
from .asymptotics_service import AsymptoticsService
from .exponent_service import ExponentService
from .kernel_service import KernelService
from .measure_service import MeasureService
from .operator_service import OperatorService
from .spectrum_service import SpectrumService

logger = structlog.get_logger(__name__)

CHECK_SEED = 20240101


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""
    seconds: float = Field(..., ge=0)


class SelfcheckReport(BaseModel):
    checks: List[CheckResult]
    passed: bool
    seconds: float = Field(..., ge=0)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "seconds": self.seconds,
            "checks": [c.model_dump() for c in self.checks],
        }

    def to_text(self) -> str:
        lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name:<24} {c.seconds:8.3f}s  {c.detail}" for c in self.checks]
        lines.append(f"{'PASS' if self.passed else 'FAIL'}  {len(self.checks)} checks in {self.seconds:.3f}s")
        return "\n".join(lines) + "\n"


Check = Callable[[], Tuple[bool, str]]


class SelfcheckService:
    """Runs the property suites of every module."""

    def __init__(
        self,
        spectrum_service: SpectrumService,
        exponent_service: ExponentService,
        measure_service: MeasureService,
        kernel_service: KernelService,
        operator_service: OperatorService,
        asymptotics_service: AsymptoticsService,
        settings: Optional[Settings] = None,
    ):
        self.settings = settings or get_settings()
        self.spectrum_service = spectrum_service
        self.exponent_service = exponent_service
        self.measure_service = measure_service
        self.kernel_service = kernel_service
        self.operator_service = operator_service
        self.asymptotics_service = asymptotics_service
        self._checks: Dict[str, Check] = {
            "coefficient-semigroup": self.check_coefficient_semigroup,
            "operator-algebra": self.check_operator_algebra,
            "generator-derivative": self.check_generator_derivative,
            "torus-closed-form": self.check_torus_closed_form,
            "torus-poisson": self.check_torus_poisson,
            "su2-sandwich": self.check_su2_sandwich,
            "trace-inequality": self.check_trace_inequality,
            "conjugation-average": self.check_conjugation_average,
            "normalization": self.check_normalization,
            "plancherel-quadrature": self.check_plancherel_quadrature,
            "regularity-verdicts": self.check_regularity_verdicts,
            "zeta": self.check_zeta,
            "su2-cauchy-fit": self.check_su2_cauchy_fit,
            "so3-cauchy-fit": self.check_so3_cauchy_fit,
            "su2-heat-fit": self.check_su2_heat_fit,
            "relativistic-fit": self.check_relativistic_fit,
            "karamata": self.check_karamata,
        }

    def names(self) -> List[str]:
        return list(self._checks)

    def run(self, only: Optional[Sequence[str]] = None) -> SelfcheckReport:
        selected = list(only) if only else self.names()
        unknown = [name for name in selected if name not in self._checks]
        if unknown:
            raise InvalidInputError(f"unknown self-checks: {', '.join(unknown)}")
        started = time.perf_counter()
        results = []
        for name in selected:
            tick = time.perf_counter()
            try:
                passed, detail = self._checks[name]()
            except Exception as e:
                logger.error("self-check raised", check=name, error=str(e), exc_info=True)
                passed, detail = False, f"raised {type(e).__name__}: {e}"
            seconds = time.perf_counter() - tick
            logger.info("self-check finished", check=name, passed=passed, seconds=round(seconds, 3))
            results.append(CheckResult(name=name, passed=passed, detail=detail, seconds=seconds))
        return SelfcheckReport(checks=results, passed=all(r.passed for r in results),
                               seconds=time.perf_counter() - started)

    # ------------------------------------------------------------------ helpers

    def _measure(self, spectrum: GroupSpectrum, exponent, t: float):
        return self.measure_service.measure(spectrum, exponent, t)

    @staticmethod
    def _relative(a: float, b: float) -> float:
        return abs(a - b) / abs(b)

    # ------------------------------------------------------------------- checks

    def check_coefficient_semigroup(self) -> Tuple[bool, str]:
        """
        ``c(s) c(t) = c(s+t)`` on 50 random draws, to 1e-15 after dividing the relative
        error by ``max(1, |(s+t) alpha|)``, the rounding gain of ``exp`` at that argument.
        """
        rng = np.random.default_rng(CHECK_SEED)
        su2 = GroupSpectrum.su2()
        worst = 0.0
        for _ in range(50):
            s, t = rng.uniform(0.0, 1.0, size=2)
            irrep = self.spectrum_service.irrep(su2, (int(rng.integers(0, 6)),))
            m = self._measure(su2, CauchyExponent(sigma=1.0), float(s))
            product = self.measure_service.coefficient(m, irrep) * self.measure_service.coefficient(m.at_time(float(t)), irrep)
            combined = self.measure_service.coefficient(m.at_time(float(s + t)), irrep)
            scale = max(1.0, abs((s + t) * self.exponent_service.symbol_alpha(m.exponent, irrep.casimir)))
            worst = max(worst, self._relative(product, combined) / scale)
        return worst <= 1e-15, f"max relative error / max(1, |(s+t) alpha|) {worst:.3g}"

    def check_operator_algebra(self) -> Tuple[bool, str]:
        rng = np.random.default_rng(CHECK_SEED)
        so3 = GroupSpectrum.so3()
        e = CauchyExponent(sigma=1.0)
        f = self.operator_service.random_function(so3, 20, rng)
        ops = self.operator_service

        lam, mu = 1.5, 0.7
        lhs = ops.apply_resolvent(e, lam, f).combine(ops.apply_resolvent(e, mu, f), 1.0, -1.0)
        rhs = ops.apply_resolvent(e, lam, ops.apply_resolvent(e, mu, f)).map_blocks(lambda _: mu - lam)
        resolvent = max(float(np.max(np.abs(a.block - b.block))) for a, b in zip(lhs, rhs))

        g = f.combine(ops.apply_generator(e, f), lam, -1.0)
        back = ops.apply_resolvent(e, lam, g)
        inverse = max(float(np.max(np.abs(a.block - b.block))) for a, b in zip(back, f))

        m = self._measure(so3, e, 0.3)
        composed = ops.apply_semigroup(m, ops.apply_semigroup(m.at_time(0.4), f))
        direct = ops.apply_semigroup(m.at_time(0.7), f)
        semigroup = max(
            float(np.max(np.abs(a.block - b.block) / np.maximum(np.abs(b.block), 1e-300)))
            / max(1.0, abs(0.7 * self.exponent_service.symbol_alpha(e, b.irrep.casimir)))
            for a, b in zip(composed, direct)
        )

        bound = ops.generator_bound_check(e, f, 2)
        chi = ops.character_function(so3, {(3,): 1.0})
        eigen = ops.apply_semigroup(m, chi).block_for((3,))
        expected = self.measure_service.coefficient(m, self.spectrum_service.irrep(so3, (3,))) * chi.block_for((3,))
        eigen_error = float(np.max(np.abs(eigen - expected)))

        passed = resolvent <= 1e-12 and inverse <= 1e-12 and semigroup <= 4e-15 and bound.holds and eigen_error == 0.0
        return passed, (f"resolvent {resolvent:.3g}, inverse {inverse:.3g}, semigroup {semigroup:.3g}, "
                        f"generator bound {bound.lhs:.4g} <= {bound.rhs:.4g}")

    def check_generator_derivative(self) -> Tuple[bool, str]:
        su2 = GroupSpectrum.su2()
        e = GaussianExponent(variance=2.0)
        h = self.settings.derivative_step
        f = self.operator_service.character_function(su2, {(n,): 1.0 for n in range(6)})
        stepped = self.operator_service.apply_semigroup(self._measure(su2, e, h), f)
        difference = stepped.combine(f, 1.0 / h, -1.0 / h)
        generator = self.operator_service.apply_generator(e, f)
        worst = 0.0
        for a, b in zip(difference, generator):
            if b.irrep.is_trivial:
                continue
            worst = max(worst, float(np.max(np.abs(a.block - b.block)) / np.max(np.abs(b.block))))
        return worst <= 1e-4, f"max relative error {worst:.3g} at h={h}"

    def check_torus_closed_form(self) -> Tuple[bool, str]:
        torus = GroupSpectrum.torus(1)
        worst = 0.0
        certified = True
        for t in (0.1, 0.5, 1.0):
            kv = self.kernel_service.density_at_identity(self._measure(torus, CauchyExponent(sigma=1.0), t))
            exact = 1.0 / math.tanh(math.pi * t)
            worst = max(worst, self._relative(kv.value, exact))
            certified = certified and kv.certified
        return worst <= 1e-10 and certified, f"max relative error {worst:.3g}"

    def check_torus_poisson(self) -> Tuple[bool, str]:
        worst = 0.0
        for d in (2, 3):
            torus = GroupSpectrum.torus(d)
            for t in (0.01, 0.1, 1.0):
                direct = self.kernel_service.density_at_identity(self._measure(torus, CauchyExponent(sigma=1.0), t)).value
                dual = self.asymptotics_service.torus_cauchy_closed_form(d, 1.0, t).value
                worst = max(worst, self._relative(dual, direct))
        return worst <= 1e-9, f"max relative difference {worst:.3g}"

    def check_su2_sandwich(self) -> Tuple[bool, str]:
        su2 = GroupSpectrum.su2()
        ok = True
        details = []
        for t in (0.005, 0.05, 0.5):
            kv = self.kernel_service.density_at_identity(self._measure(su2, CauchyExponent(sigma=1.0), t))
            s = self.asymptotics_service.su2_cauchy_comparison_series(1.0, t)
            inside = math.exp(-t) * s <= kv.lower() and kv.upper() <= math.exp(t) * s
            ok = ok and inside and kv.certified
            details.append(f"t={t}: {kv.value / s:.6f}")
        return ok, "k/S " + ", ".join(details)

    def check_trace_inequality(self) -> Tuple[bool, str]:
        ok = True
        details = []
        for spectrum in (GroupSpectrum.su2(), GroupSpectrum.so3(), GroupSpectrum.torus(1)):
            for exponent in (GaussianExponent(variance=1.0), CauchyExponent(sigma=1.0)):
                for t in (0.1, 1.0):
                    m = self._measure(spectrum, exponent, t)
                    full = self.kernel_service.trace_full(m)
                    central = self.kernel_service.trace_central(m)
                    if spectrum.is_abelian:
                        ok = ok and self._relative(full.value, central.value) <= 1e-14
                    else:
                        ok = ok and full.lower() > central.upper()
            details.append(spectrum.describe())
        return ok, "checked " + ", ".join(details)

    def check_conjugation_average(self) -> Tuple[bool, str]:
        m = self._measure(GroupSpectrum.su2(), GaussianExponent(variance=1.0), 1.0)
        average = self.kernel_service.conjugation_average(m)
        central = self.kernel_service.trace_central(m).value
        error = abs(average - central)
        return error <= 1e-5, f"|average - trace| = {error:.3g}"

    def check_normalization(self) -> Tuple[bool, str]:
        worst = 0.0
        for spectrum in (GroupSpectrum.su2(), GroupSpectrum.so3()):
            for exponent in (GaussianExponent(variance=1.0), CauchyExponent(sigma=1.0)):
                total = self.kernel_service.normalization(self._measure(spectrum, exponent, 0.5))
                worst = max(worst, abs(total - 1.0))
        return worst <= 1e-8, f"max |integral - 1| = {worst:.3g}"

    def check_plancherel_quadrature(self) -> Tuple[bool, str]:
        su2 = GroupSpectrum.su2()
        worst = 0.0
        for exponent in (GaussianExponent(variance=1.0), CauchyExponent(sigma=1.0)):
            m = self._measure(su2, exponent, 0.5)
            series = self.kernel_service.plancherel_product(m, m).value
            quadrature = self.kernel_service.inner_product_quadrature(m, m)
            worst = max(worst, self._relative(quadrature, series))
        return worst <= 1e-6, f"max relative difference {worst:.3g}"

    def check_regularity_verdicts(self) -> Tuple[bool, str]:
        su2, so3 = GroupSpectrum.su2(), GroupSpectrum.so3()
        ok = True
        for spectrum in (su2, so3):
            verdict = self.measure_service.classify_regularity(self._measure(spectrum, LaplaceExponent(beta=1.0), 1.0),
                                                               RegularityLevel.L2)
            ok = ok and verdict.verdict == Verdict.HOLDS
        smooth = (StableExponent(b=1.0, alpha=1.0), GaussianExponent(variance=1.0), CauchyExponent(sigma=1.0),
                  RelativisticExponent(mass=1.0))
        for spectrum in (su2, so3, GroupSpectrum.torus(1)):
            for exponent in smooth:
                m = self._measure(spectrum, exponent, 1.0)
                for k in (0, 5, 10):
                    verdict = self.measure_service.classify_regularity(m, RegularityLevel.CK, k)
                    ok = ok and verdict.verdict == Verdict.HOLDS
        return ok, "Laplace square-integrable on SU(2), SO(3); smooth families C^k up to k = 10"

    def check_zeta(self) -> Tuple[bool, str]:
        report = self.measure_service.sugiura_zeta(GroupSpectrum.su2(), 2.0, max_count=10_000)
        limit = math.pi ** 2 / 12.0 - 11.0 / 16.0
        error = abs(report.partial_sum - limit)
        ok = error <= 1e-3 and report.tail_bound is not None and error <= report.tail_bound + 1e-15
        return ok, f"partial sum error {error:.3g}, tail bound {report.tail_bound}"

    def _fit_check(self, spectrum: GroupSpectrum, exponent, expected_c: float, expected_p: float) -> Tuple[bool, str]:
        fit = self.asymptotics_service.fit_identity_density(spectrum, exponent)
        ok = abs(fit.p - expected_p) <= 0.05 and self._relative(fit.C, expected_c) <= 0.05
        return ok, f"C={fit.C:.5g} (expected {expected_c:.5g}), p={fit.p:.5f}"

    def check_su2_cauchy_fit(self) -> Tuple[bool, str]:
        results = [self._fit_check(GroupSpectrum.su2(), CauchyExponent(sigma=s), 2.0 / s ** 3, 3.0) for s in (0.5, 1.0, 2.0)]
        return all(r[0] for r in results), "; ".join(r[1] for r in results)

    def check_so3_cauchy_fit(self) -> Tuple[bool, str]:
        return self._fit_check(GroupSpectrum.so3(), CauchyExponent(sigma=1.0), 8.0, 3.0)

    def check_su2_heat_fit(self) -> Tuple[bool, str]:
        su2 = GroupSpectrum.su2()
        reference = self.asymptotics_service.heat_asymptotic_reference(su2, 1.0, 1.0) / math.exp(1.0 / 8.0)
        return self._fit_check(su2, self.asymptotics_service.heat_reference_exponent(1.0), reference, 1.5)

    def check_relativistic_fit(self) -> Tuple[bool, str]:
        return self._fit_check(GroupSpectrum.su2(), RelativisticExponent(mass=1.0), 2.0, 3.0)

    def check_karamata(self) -> Tuple[bool, str]:
        su2 = GroupSpectrum.su2()
        exponent = CauchyExponent(sigma=1.0)
        fit = self.asymptotics_service.fit_identity_density(su2, exponent)
        report = self.asymptotics_service.karamata_check(exponent, su2, fit)
        return report.converged, "ratios " + ", ".join(f"{r:.4f}" for r in report.ratios[-3:]) + f" vs C={fit.C:.4f}"
