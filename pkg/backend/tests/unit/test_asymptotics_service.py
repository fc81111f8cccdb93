"""
Unit tests for closed forms, power-law fits and eigenvalue counting.
"""
import math

import numpy as np
import pytest

from src.errors import CapabilityError, InvalidInputError
from src.models.asymptotics import PowerLawFit
from src.models.exponent import CauchyExponent, GaussianJumpsExponent
from src.models.spectrum import GroupSpectrum


class TestClosedForms:
    def test_leading_constants(self, asymptotics_service):
        assert asymptotics_service.torus_cauchy_leading_constant(1, 2.0) == pytest.approx(1.0 / (2.0 * math.pi))
        assert asymptotics_service.torus_cauchy_leading_constant(2, 1.0) == pytest.approx(1.0 / (2.0 * math.pi))

    def test_circle_is_exact(self, asymptotics_service):
        value = asymptotics_service.torus_cauchy_closed_form(1, 1.0, 0.3)
        assert value.exact
        assert value.value == 1.0 / math.tanh(0.3 * math.pi)

    @pytest.mark.parametrize("d, t", [(2, 0.05), (2, 0.1), (2, 1.0), (3, 0.1), (3, 1.0)])
    def test_torus_poisson_matches_direct_sum(self, asymptotics_service, measure_service, kernel_service, cauchy,
                                              d, t):
        direct = kernel_service.density_at_identity(measure_service.measure(GroupSpectrum.torus(d), cauchy, t))
        dual = asymptotics_service.torus_cauchy_closed_form(d, 1.0, t)
        assert not dual.exact
        assert direct.certified
        assert dual.value == pytest.approx(direct.value, rel=1e-9)
        assert dual.error_estimate < 1e-12 * dual.value
        assert abs(dual.value - direct.value) <= dual.error_estimate + direct.tail_bound + 1e-13 * direct.value

    def test_torus_poisson_stable_under_cutoff(self, asymptotics_service):
        short = asymptotics_service.torus_cauchy_closed_form(2, 1.0, 1.0, m_cutoff=40.0)
        long = asymptotics_service.torus_cauchy_closed_form(2, 1.0, 1.0, m_cutoff=80.0)
        assert long.terms_used > short.terms_used
        assert long.value == pytest.approx(short.value, rel=1e-12)

    def test_torus_small_time_leading_term(self, asymptotics_service):
        t = 0.01
        value = asymptotics_service.torus_cauchy_closed_form(2, 1.0, t).value
        assert value * t ** 2 == pytest.approx(asymptotics_service.torus_cauchy_leading_constant(2, 1.0), rel=1e-2)

    @pytest.mark.parametrize("args", [(0, 1.0, 1.0), (2, 0.0, 1.0), (2, 1.0, -1.0)])
    def test_closed_form_rejects(self, asymptotics_service, args):
        with pytest.raises(InvalidInputError):
            asymptotics_service.torus_cauchy_closed_form(*args)

    def test_closed_form_needs_room_for_the_cutoff(self, asymptotics_service):
        with pytest.raises(InvalidInputError):
            asymptotics_service.torus_cauchy_closed_form(2, 1.0, 0.1, m_cutoff=20.0)

    def test_comparison_series(self, asymptotics_service):
        m = np.arange(1, 400, dtype=float)
        direct = float(np.sum(m ** 2 * np.exp(-0.5 * m)))
        assert asymptotics_service.su2_cauchy_comparison_series(1.0, 0.5) == pytest.approx(direct, rel=1e-12)

    def test_heat_reference_exponent(self, asymptotics_service, exponent_service):
        e = asymptotics_service.heat_reference_exponent(2.0)
        assert exponent_service.eval_eta(e, 2.0) == pytest.approx(1.0)

    def test_heat_reference_amplitude(self, asymptotics_service, su2, so3):
        value = asymptotics_service.heat_asymptotic_reference(su2, 1.0, 1.0)
        assert value / math.exp(0.125) == pytest.approx(10.0266, rel=1e-4)
        with pytest.raises(CapabilityError):
            asymptotics_service.heat_asymptotic_reference(so3, 1.0, 1.0)

    @pytest.mark.parametrize("t", [0.05, 0.5])
    def test_weyl_trace_form(self, asymptotics_service, measure_service, kernel_service, su2, cauchy, heat, t):
        for exponent in (cauchy, heat):
            m = measure_service.measure(su2, exponent, t)
            weyl = asymptotics_service.weyl_trace_form(m)
            assert weyl.certified
            assert weyl.value == pytest.approx(kernel_service.density_at_identity(m).value, rel=1e-12)

    def test_weyl_trace_form_su2_only(self, asymptotics_service, measure_service, so3, cauchy):
        with pytest.raises(CapabilityError):
            asymptotics_service.weyl_trace_form(measure_service.measure(so3, cauchy, 1.0))


class TestFits:
    def test_exact_power_law(self, asymptotics_service):
        samples = [(float(t), 3.0 * t ** -2.0) for t in np.geomspace(0.01, 0.1, 8)]
        fit = asymptotics_service.fit_power_law(samples)
        assert fit.C == pytest.approx(3.0, rel=1e-9)
        assert fit.p == pytest.approx(2.0, rel=1e-9)
        assert fit.residual < 1e-9
        assert fit.model_value(0.5) == pytest.approx(12.0, rel=1e-9)

    def test_window_filters_samples(self, asymptotics_service):
        samples = [(float(t), 1.0 / t) for t in np.geomspace(0.01, 1.0, 9)]
        fit = asymptotics_service.fit_power_law(samples, window=(0.01, 0.2))
        assert all(t <= 0.2 for t, _ in fit.samples)
        assert fit.window == (0.01, 0.2)
        with pytest.raises(InvalidInputError):
            asymptotics_service.fit_power_law(samples, window=(0.5, 1.0))

    def test_rejects_non_positive_values(self, asymptotics_service):
        samples = [(0.1, 1.0), (0.2, 1.0), (0.3, 0.0), (0.4, 1.0), (0.5, 1.0)]
        with pytest.raises(InvalidInputError):
            asymptotics_service.fit_power_law(samples)

    def test_sample_identity_density(self, asymptotics_service, su2, cauchy):
        pairs = asymptotics_service.sample_identity_density(su2, cauchy, window=(0.05, 0.2), samples=5)
        assert len(pairs) == 5
        assert pairs[0][0] == pytest.approx(0.05)
        assert pairs[-1][0] == pytest.approx(0.2)
        values = [v for _, v in pairs]
        assert values == sorted(values, reverse=True)

    def test_stable_exploration(self, asymptotics_service, su2):
        report = asymptotics_service.stable_exploration(su2, alpha=1.0, window=(0.02, 0.1), samples=6)
        assert report.conjectured_p == 3.0
        assert report.certified_samples == 6
        assert report.fit.p == pytest.approx(3.0, abs=0.05)
        assert "conjecture" in report.note

    def test_exploration_on_a_table(self, asymptotics_service, su3):
        report = asymptotics_service.stable_exploration(su3, alpha=2.0, window=(0.5, 2.0), samples=5)
        assert report.conjectured_p == 4.0
        assert report.certified_samples == 0


class TestCounting:
    def test_su2_cauchy(self, asymptotics_service, su2, cauchy):
        counting = asymptotics_service.eigenvalue_counting(cauchy, su2, [0.0, 2.0, 4.0])
        assert counting.counts == [1, 5, 30]

    def test_circle(self, asymptotics_service, circle, cauchy):
        counting = asymptotics_service.eigenvalue_counting(cauchy, circle, [0.0, 7.0])
        assert counting.counts == [1, 3]

    def test_empty(self, asymptotics_service, su2, cauchy):
        assert asymptotics_service.eigenvalue_counting(cauchy, su2, []).counts == []

    def test_unsorted_thresholds(self, asymptotics_service, su2, cauchy):
        with pytest.raises(InvalidInputError):
            asymptotics_service.eigenvalue_counting(cauchy, su2, [2.0, 1.0])

    def test_bounded_exponent(self, asymptotics_service, su2):
        with pytest.raises(CapabilityError):
            asymptotics_service.eigenvalue_counting(GaussianJumpsExponent(rate=1.0, jump_variance=1.0), su2, [0.5])

    def test_tauberian_ratios(self, asymptotics_service):
        assert asymptotics_service.tauberian_ratios([1.0, 4.0], [2, 16], 2.0) == pytest.approx([4.0, 2.0])

    def test_karamata_needs_stable_family(self, asymptotics_service, su2, heat):
        fit = PowerLawFit(C=2.0, p=3.0, residual=0.0, window=(0.001, 0.01))
        with pytest.raises(CapabilityError):
            asymptotics_service.karamata_check(heat, su2, fit)

    def test_karamata_needs_dimension(self, asymptotics_service, spectrum_service):
        spectrum = spectrum_service.load_spectrum("index,dim,casimir\n0,1,0\n1,2,3\n2,3,8\n")
        fit = PowerLawFit(C=2.0, p=3.0, residual=0.0, window=(0.001, 0.01))
        with pytest.raises(CapabilityError):
            asymptotics_service.karamata_check(CauchyExponent(sigma=1.0), spectrum, fit)

    def test_karamata_report_shape(self, asymptotics_service, su2, cauchy):
        fit = PowerLawFit(C=2.0, p=3.0, residual=0.0, window=(0.001, 0.01))
        report = asymptotics_service.karamata_check(cauchy, su2, fit, lambda_max=64.0)
        assert report.rho == 3.0
        assert report.thresholds == [2.0, 4.0, 8.0, 16.0, 32.0, 64.0]
        assert len(report.ratios) == 6
