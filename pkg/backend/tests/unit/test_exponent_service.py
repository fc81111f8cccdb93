"""
Unit tests for exponent parsing, evaluation and growth bounds.
"""
import math

import numpy as np
import pytest

from src.errors import InvalidInputError
from src.models.exponent import (
    Bounded,
    CauchyExponent,
    CompoundPoissonExponent,
    ConvolutionExponent,
    ExponentialType,
    GaussianExponent,
    GaussianJumpsExponent,
    LaplaceExponent,
    Logarithmic,
    RelativisticExponent,
    StableExponent,
)

SPECS = [
    "family=gaussian variance=2.0",
    "family=laplace beta=0.5",
    "family=stable b=1.0 alpha=1.5",
    "family=cauchy sigma=1.0",
    "family=relativistic mass=1.0",
    "family=compound_poisson rate=2.0 atoms=1.0:0.5;3.0:0.5",
    "family=levy_khintchine variance=1.0 atoms=0.5:1.0",
    "family=gaussian_jumps rate=1.0 jump_variance=2.0",
    "family=cauchy sigma=1.0 + family=gaussian variance=0.5",
]


class TestParsing:
    @pytest.mark.parametrize("text", SPECS)
    def test_format_is_canonical(self, exponent_service, text):
        e = exponent_service.parse_exponent(text)
        assert exponent_service.parse_exponent(exponent_service.format_exponent(e)) == e

    def test_families(self, exponent_service):
        assert isinstance(exponent_service.parse_exponent(SPECS[0]), GaussianExponent)
        assert isinstance(exponent_service.parse_exponent(SPECS[5]), CompoundPoissonExponent)
        convolution = exponent_service.parse_exponent(SPECS[-1])
        assert isinstance(convolution, ConvolutionExponent)
        assert [p.family for p in convolution.parts] == ["cauchy", "gaussian"]

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "family=unknown x=1",
            "family=cauchy",
            "family=cauchy sigma=1 extra=2",
            "family=cauchy sigma=abc",
            "family=cauchy sigma=-1",
            "family=stable b=1 alpha=2.5",
            "family=compound_poisson rate=1 atoms=1:0.3;2:0.3",
            "family=compound_poisson rate=1 atoms=1-0.5",
            "family=levy_khintchine variance=0",
            "family=cauchy sigma=1 sigma=2",
        ],
    )
    def test_rejects(self, exponent_service, text):
        with pytest.raises(InvalidInputError):
            exponent_service.parse_exponent(text)


class TestEvaluation:
    def test_values(self, exponent_service):
        u = np.array([0.0, 1.0, 2.0])
        np.testing.assert_allclose(GaussianExponent(variance=2.0).eta(u), [0.0, 1.0, 4.0])
        np.testing.assert_allclose(CauchyExponent(sigma=3.0).eta(u), [0.0, 3.0, 6.0])
        np.testing.assert_allclose(LaplaceExponent(beta=1.0).eta(u), np.log1p(u ** 2))
        np.testing.assert_allclose(RelativisticExponent(mass=1.0).eta(u), np.sqrt(u ** 2 + 1.0) - 1.0)
        np.testing.assert_allclose(GaussianJumpsExponent(rate=2.0, jump_variance=1.0).eta(u),
                                   2.0 * (1.0 - np.exp(-0.5 * u ** 2)))

    def test_scalar_in_float_out(self, exponent_service):
        assert exponent_service.eval_eta(CauchyExponent(sigma=2.0), 1.5) == 3.0

    def test_symbol_alpha(self, exponent_service):
        assert exponent_service.symbol_alpha(CauchyExponent(sigma=1.0), 9.0) == -3.0
        with pytest.raises(InvalidInputError):
            exponent_service.symbol_alpha(CauchyExponent(sigma=1.0), -1.0)

    def test_relativistic_small_u(self):
        u = 1e-9
        assert RelativisticExponent(mass=1.0).eta(u) == pytest.approx(0.5 * u * u, rel=1e-12)

    def test_compound_poisson_small_u(self):
        e = CompoundPoissonExponent(rate=1.0, atoms=({"position": 1.0, "weight": 1.0},))
        assert float(e.eta(1e-9)) == pytest.approx(0.5e-18, rel=1e-9)

    def test_convolution_adds(self, exponent_service):
        e = exponent_service.convolve(CauchyExponent(sigma=1.0), GaussianExponent(variance=2.0))
        assert exponent_service.eval_eta(e, 2.0) == pytest.approx(2.0 + 4.0)

    def test_nested_convolution_is_flat(self, exponent_service):
        inner = exponent_service.convolve(CauchyExponent(sigma=1.0), GaussianExponent(variance=2.0))
        outer = exponent_service.convolve(inner, LaplaceExponent(beta=1.0))
        assert len(outer.parts) == 3

    def test_bernstein_view(self, exponent_service):
        view = exponent_service.bernstein_view(StableExponent(b=1.0, alpha=1.0))
        assert float(view.f(4.0)) == pytest.approx(2.0)
        cp = CompoundPoissonExponent(rate=1.0, atoms=({"position": 1.0, "weight": 1.0},))
        assert exponent_service.bernstein_view(cp) is None


class TestDecayClasses:
    def test_classes(self, exponent_service):
        assert exponent_service.decay_class(GaussianExponent(variance=2.0)) == ExponentialType(gamma=2.0, c=1.0)
        assert exponent_service.decay_class(StableExponent(b=2.0, alpha=0.5)) == ExponentialType(
            gamma=0.5, c=2.0 ** 0.5)
        assert isinstance(exponent_service.decay_class(LaplaceExponent(beta=2.0)), Logarithmic)
        assert exponent_service.decay_class(GaussianJumpsExponent(rate=3.0, jump_variance=1.0)) == Bounded(bound=3.0)

    def test_relativistic_lower_bound_holds(self):
        e = RelativisticExponent(mass=2.0)
        decay = e.decay_class()
        u = np.linspace(decay.u0, decay.u0 + 100.0, 1001)
        assert np.all(e.eta(u) >= decay.c * u ** decay.gamma - 1e-12)

    def test_convolution_takes_strongest(self, exponent_service):
        e = exponent_service.convolve(LaplaceExponent(beta=1.0), GaussianJumpsExponent(rate=1.0, jump_variance=1.0))
        assert isinstance(e.decay_class(), Logarithmic)
        e = exponent_service.convolve(e, CauchyExponent(sigma=1.0))
        assert e.decay_class() == ExponentialType(gamma=1.0, c=1.0)


class TestGrowthBound:
    @pytest.mark.parametrize(
        "exponent",
        [
            GaussianExponent(variance=2.0),
            CauchyExponent(sigma=1.0),
            StableExponent(b=1.5, alpha=0.7),
            LaplaceExponent(beta=2.0),
            RelativisticExponent(mass=0.5),
            GaussianJumpsExponent(rate=2.0, jump_variance=3.0),
            CompoundPoissonExponent(rate=2.0, atoms=({"position": 1.0, "weight": 0.5},
                                                     {"position": 3.0, "weight": 0.5})),
        ],
    )
    def test_dominates_on_a_fine_grid(self, exponent_service, exponent):
        k = exponent_service.growth_bound(exponent)
        u = np.linspace(0.0, 50.0, 200_001)
        assert np.all(exponent.eta(u) <= k * (1.0 + u * u))

    def test_cauchy_constant(self, exponent_service):
        assert exponent_service.growth_bound(CauchyExponent(sigma=1.0)) == pytest.approx(0.5, rel=1e-9)

    def test_convolution_sums(self, exponent_service):
        parts = (CauchyExponent(sigma=1.0), GaussianExponent(variance=2.0))
        e = exponent_service.convolve(*parts)
        expected = sum(exponent_service.growth_bound(p) for p in parts)
        assert exponent_service.growth_bound(e) == pytest.approx(expected)

    def test_stable_supremum(self, exponent_service):
        e = StableExponent(b=1.0, alpha=1.0)
        assert exponent_service.growth_bound(e) == pytest.approx(0.5, rel=1e-9)
        assert math.isfinite(exponent_service.growth_bound(StableExponent(b=1.0, alpha=1.9)))

    def test_compound_poisson_bound_sums_atoms(self, exponent_service):
        e = CompoundPoissonExponent(rate=2.0, atoms=({"position": 1.0, "weight": 0.5},
                                                     {"position": 3.0, "weight": 0.5}))
        per_atom = 2.0 * (0.5 * 2.0 / 5.0 + 0.5 * 18.0 / 13.0)
        assert exponent_service.growth_bound(e) == pytest.approx(per_atom, rel=1e-9)
        assert exponent_service.growth_bound(e) < 2.0 * 2.0 * 5.0 / 9.0

    def test_compound_poisson_rate_alone_is_too_small(self, exponent_service):
        e = CompoundPoissonExponent(rate=2.0, atoms=({"position": math.pi, "weight": 1.0},))
        k = exponent_service.growth_bound(e)
        assert k > 2.0
        assert float(e.eta(0.8)) > 2.0 * (1.0 + 0.8 ** 2)
        u = np.linspace(0.0, 5.0, 50_001)
        assert np.all(e.eta(u) <= k * (1.0 + u * u))
