"""
Unit tests for Fourier data, the semigroup, its generator and resolvent.
"""
import math

import numpy as np
import pytest

from src.errors import CapabilityError, InvalidInputError, SpectrumMismatchError
from src.models.exponent import CauchyExponent, GaussianExponent, LaplaceExponent, StableExponent
from src.models.spectrum import ClassPoint


class TestConstruction:
    def test_character_function(self, operator_service, su2):
        f = operator_service.character_function(su2, {(2,): 3.0})
        assert f.class_flag
        np.testing.assert_allclose(f.block_for((2,)), np.eye(3))

    def test_coordinate_function(self, operator_service, su2):
        f = operator_service.coordinate_function(su2, (1,), 0, 1)
        block = f.block_for((1,))
        assert block[1, 0] == 0.5
        assert np.count_nonzero(block) == 1
        assert not f.class_flag

    def test_coordinate_out_of_range(self, operator_service, su2):
        with pytest.raises(InvalidInputError):
            operator_service.coordinate_function(su2, (1,), 0, 2)

    def test_random_function(self, operator_service, su2, rng):
        f = operator_service.random_function(su2, 5, rng)
        assert len(f) == 5
        assert not f.class_flag
        assert operator_service.random_function(su2, 5, rng, class_only=True).class_flag

    def test_blocks_sorted_by_casimir(self, operator_service, so3):
        f = operator_service.character_function(so3, {(3,): 1.0, (0,): 1.0, (1,): 1.0})
        assert [entry.irrep.index for entry in f] == [(0,), (1,), (3,)]

    def test_json_round_trip(self, operator_service, su2, rng):
        f = operator_service.random_function(su2, 4, rng)
        g = operator_service.from_json(su2, f.to_json())
        for entry in f:
            np.testing.assert_array_equal(g.block_for(entry.irrep.index), entry.block)

    @pytest.mark.parametrize("text", ["{", '{"x": [[1, 0]]}', '{"1": [[1, 0]]}'])
    def test_json_rejects(self, operator_service, su2, text):
        with pytest.raises(InvalidInputError):
            operator_service.from_json(su2, text)

    def test_combine_cancels(self, operator_service, su2, rng):
        f = operator_service.random_function(su2, 3, rng)
        zero = f.combine(f, 1.0, -1.0)
        assert all(np.all(entry.block == 0) for entry in zero)


class TestMultipliers:
    def test_semigroup_scales_blocks(self, operator_service, measure_service, su2, cauchy):
        f = operator_service.character_function(su2, {(1,): 1.0, (3,): 2.0})
        g = operator_service.apply_semigroup(measure_service.measure(su2, cauchy, 0.5), f)
        np.testing.assert_allclose(g.block_for((3,)), math.exp(-0.5 * math.sqrt(15.0)) * f.block_for((3,)))
        np.testing.assert_allclose(g.block_for((1,)), math.exp(-0.5 * math.sqrt(3.0)) * f.block_for((1,)))

    def test_semigroup_property(self, operator_service, measure_service, su2, heat, rng):
        f = operator_service.random_function(su2, 6, rng)
        m = measure_service.measure(su2, heat, 0.3)
        twice = operator_service.apply_semigroup(m.at_time(0.2), operator_service.apply_semigroup(m, f))
        once = operator_service.apply_semigroup(m.at_time(0.5), f)
        for entry in once:
            np.testing.assert_allclose(twice.block_for(entry.irrep.index), entry.block, rtol=1e-13)

    def test_semigroup_at_zero_is_identity(self, operator_service, measure_service, su2, cauchy, rng):
        f = operator_service.random_function(su2, 4, rng)
        g = operator_service.apply_semigroup(measure_service.measure(su2, cauchy, 0.0), f)
        for entry in f:
            np.testing.assert_array_equal(g.block_for(entry.irrep.index), entry.block)

    def test_generator_symbol(self, operator_service, su2, cauchy):
        f = operator_service.coordinate_function(su2, (2,), 1, 2)
        g = operator_service.apply_generator(cauchy, f)
        np.testing.assert_allclose(g.block_for((2,)), -math.sqrt(8.0) * f.block_for((2,)))

    def test_resolvent_inverts(self, operator_service, su2, rng):
        e = GaussianExponent(variance=1.0)
        f = operator_service.random_function(su2, 6, rng)
        r = operator_service.apply_resolvent(e, 2.0, f)
        back = r.combine(operator_service.apply_generator(e, r), 2.0, -1.0)
        for entry in f:
            np.testing.assert_allclose(back.block_for(entry.irrep.index), entry.block, rtol=1e-12, atol=1e-14)

    @pytest.mark.parametrize("lam", [0.0, -1.0])
    def test_resolvent_needs_positive_lambda(self, operator_service, su2, cauchy, rng, lam):
        with pytest.raises(InvalidInputError):
            operator_service.apply_resolvent(cauchy, lam, operator_service.random_function(su2, 2, rng))

    def test_eigencomponents(self, operator_service, so3, cauchy, rng):
        f = operator_service.random_function(so3, 4, rng)
        parts = operator_service.eigencomponents(f)
        assert len(parts) == 4
        for part in parts:
            (entry,) = part.blocks
            g = operator_service.apply_generator(cauchy, part)
            alpha = -math.sqrt(entry.irrep.casimir)
            np.testing.assert_allclose(g.block_for(entry.irrep.index), alpha * entry.block, atol=1e-15)

    def test_semigroup_spectrum_mismatch(self, operator_service, measure_service, su2, so3, cauchy, rng):
        f = operator_service.random_function(so3, 2, rng)
        with pytest.raises(SpectrumMismatchError):
            operator_service.apply_semigroup(measure_service.measure(su2, cauchy, 1.0), f)


class TestNorms:
    def test_sobolev_norm_of_coordinate(self, operator_service, su2):
        f = operator_service.coordinate_function(su2, (1,), 0, 0)
        assert operator_service.sobolev_norm(f, 0).value == pytest.approx(math.sqrt(0.5))
        assert operator_service.sobolev_norm(f, 2).value == pytest.approx(math.sqrt(8.0))

    def test_negative_order(self, operator_service, su2):
        with pytest.raises(InvalidInputError):
            operator_service.sobolev_norm(operator_service.character_function(su2, {(0,): 1.0}), -1)

    @pytest.mark.parametrize(
        "exponent",
        [CauchyExponent(sigma=1.0), GaussianExponent(variance=2.0), StableExponent(b=1.0, alpha=1.3),
         LaplaceExponent(beta=1.0)],
    )
    @pytest.mark.parametrize("p", [2, 4])
    def test_generator_bound_holds(self, operator_service, su2, rng, exponent, p):
        f = operator_service.random_function(su2, 12, rng)
        bound = operator_service.generator_bound_check(exponent, f, p)
        assert bound.holds
        assert bound.lhs <= bound.rhs * (1.0 + 1e-12)

    def test_generator_bound_needs_order_two(self, operator_service, su2, cauchy, rng):
        with pytest.raises(InvalidInputError):
            operator_service.generator_bound_check(cauchy, operator_service.random_function(su2, 2, rng), 1)


class TestSynthesis:
    def test_su2_characters(self, operator_service, spectrum_service, su2):
        f = operator_service.character_function(su2, {(0,): 1.0, (1,): 2.0})
        assert operator_service.synthesize_class(f, spectrum_service.identity_point(su2)) == pytest.approx(5.0)
        theta = 0.8
        value = operator_service.synthesize_class(f, spectrum_service.class_point(su2, (theta,)))
        assert value == pytest.approx(1.0 + 4.0 * math.cos(theta))

    def test_circle_cosine(self, operator_service, spectrum_service, circle):
        f = operator_service.character_function(circle, {(1,): 1.0, (-1,): 1.0})
        points = [spectrum_service.class_point(circle, (x,)) for x in (0.0, 0.25, 0.5)]
        values = operator_service.synthesize_class_grid(f, points)
        np.testing.assert_allclose(values, [2.0, 0.0, -2.0], atol=1e-14)

    def test_matrix_data_cannot_be_synthesized(self, operator_service, spectrum_service, su2):
        f = operator_service.coordinate_function(su2, (1,), 0, 1)
        with pytest.raises(CapabilityError):
            operator_service.synthesize_class(f, spectrum_service.identity_point(su2))

    def test_generic_identity_only(self, operator_service, su3):
        f = operator_service.character_function(su3, {(1, 1): 1.0})
        assert operator_service.synthesize_class(f, ClassPoint(coordinates=(0.0,))) == pytest.approx(8.0)
        with pytest.raises(CapabilityError):
            operator_service.synthesize_class(f, ClassPoint(coordinates=(0.5,)))

    def test_empty_function(self, operator_service, spectrum_service, su2):
        f = operator_service.character_function(su2, {})
        assert operator_service.synthesize_class(f, spectrum_service.identity_point(su2)) == 0.0
