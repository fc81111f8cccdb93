"""
Acceptance runs: small-time fits, Tauberian ratios and the full self-check suite.
"""
import math

import pytest

from src.models.exponent import CauchyExponent, RelativisticExponent
from src.models.spectrum import GroupSpectrum

pytestmark = pytest.mark.slow


class TestSmallTimeFits:
    @pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
    def test_su2_cauchy(self, asymptotics_service, su2, sigma):
        fit = asymptotics_service.fit_identity_density(su2, CauchyExponent(sigma=sigma))
        assert fit.p == pytest.approx(3.0, abs=0.05)
        assert fit.C == pytest.approx(2.0 / sigma ** 3, rel=0.05)

    def test_so3_cauchy(self, asymptotics_service, so3, cauchy):
        fit = asymptotics_service.fit_identity_density(so3, cauchy)
        assert fit.p == pytest.approx(3.0, abs=0.05)
        assert fit.C == pytest.approx(8.0, rel=0.05)

    def test_su2_heat(self, asymptotics_service, su2):
        exponent = asymptotics_service.heat_reference_exponent(1.0)
        fit = asymptotics_service.fit_identity_density(su2, exponent)
        assert fit.p == pytest.approx(1.5, abs=0.05)
        reference = asymptotics_service.heat_asymptotic_reference(su2, 1.0, 1.0) / math.exp(0.125)
        assert fit.C == pytest.approx(reference, rel=0.05)

    def test_relativistic(self, asymptotics_service, su2):
        fit = asymptotics_service.fit_identity_density(su2, RelativisticExponent(mass=1.0))
        assert fit.p == pytest.approx(3.0, abs=0.05)
        assert fit.C == pytest.approx(2.0, rel=0.05)

    def test_karamata(self, asymptotics_service, su2, cauchy):
        fit = asymptotics_service.fit_identity_density(su2, cauchy)
        report = asymptotics_service.karamata_check(cauchy, su2, fit)
        assert report.converged
        assert report.ratios[-1] == pytest.approx(2.0, rel=0.1)


class TestSandwich:
    @pytest.mark.parametrize("t", [0.005, 0.05, 0.5])
    def test_su2_cauchy_between_comparison_series(self, asymptotics_service, measure_service, kernel_service,
                                                  su2, cauchy, t):
        kv = kernel_service.density_at_identity(measure_service.measure(su2, cauchy, t))
        s = asymptotics_service.su2_cauchy_comparison_series(1.0, t)
        assert kv.certified
        assert math.exp(-t) * s <= kv.lower()
        assert kv.upper() <= math.exp(t) * s


class TestTorus:
    @pytest.mark.parametrize("d", [2, 3])
    @pytest.mark.parametrize("t", [0.005, 0.01, 0.1, 1.0])
    def test_poisson_form(self, asymptotics_service, measure_service, kernel_service, cauchy, d, t):
        direct = kernel_service.density_at_identity(measure_service.measure(GroupSpectrum.torus(d), cauchy, t))
        dual = asymptotics_service.torus_cauchy_closed_form(d, 1.0, t)
        assert dual.value == pytest.approx(direct.value, rel=1e-9)
        assert abs(dual.value - direct.value) <= dual.error_estimate + direct.tail_bound + 1e-13 * direct.value


class TestSelfcheckSuite:
    def test_everything_passes(self, selfcheck_service):
        report = selfcheck_service.run()
        failed = [(c.name, c.detail) for c in report.checks if not c.passed]
        assert not failed
        assert len(report.checks) == 17
