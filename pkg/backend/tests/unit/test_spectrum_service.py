"""
Unit tests for spectra, characters, group arithmetic and Weyl integration.
"""
import math

import numpy as np
import pytest

from src.errors import CapabilityError, InvalidInputError, KindMismatchError, SpectrumParseError
from src.models.spectrum import GroupKind, GroupSpectrum
from src.services.spectrum_service import FOUR_PI_SQ, dirichlet_kernel


class TestParsing:
    def test_builtin_specs(self, spectrum_service):
        assert spectrum_service.parse_group_spec("su2").kind == GroupKind.SU2
        assert spectrum_service.parse_group_spec("SO3").kind == GroupKind.SO3
        torus = spectrum_service.parse_group_spec("torus:3")
        assert torus.kind == GroupKind.TORUS and torus.rank == 3 and torus.dim == 3

    @pytest.mark.parametrize("text", ["torus:0", "torus:x", "sp4", ""])
    def test_bad_specs(self, spectrum_service, text):
        with pytest.raises(InvalidInputError):
            spectrum_service.parse_group_spec(text)

    def test_generic_needs_file(self, spectrum_service):
        with pytest.raises(InvalidInputError):
            spectrum_service.parse_group_spec("generic")

    def test_su3_table(self, su3):
        assert su3.kind == GroupKind.GENERIC
        assert su3.dim == 8 and su3.rank == 2 and su3.weyl_order == 6
        assert su3.rho_sq == 1.0
        assert su3.m == 3.0
        casimirs = [r.casimir for r in su3.table]
        assert casimirs == sorted(casimirs)
        assert su3.table[0].index == (0, 0) and su3.table[0].dim == 1
        assert su3.table[1].dim == 3

    def test_missing_header(self, spectrum_service):
        with pytest.raises(SpectrumParseError) as info:
            spectrum_service.load_spectrum("0,1,0\n")
        assert info.value.line == 1

    def test_duplicate_index(self, spectrum_service):
        text = "index,dim,casimir\n0,1,0\n1,2,3\n1,2,3\n"
        with pytest.raises(SpectrumParseError) as info:
            spectrum_service.load_spectrum(text)
        assert info.value.line == 4

    def test_negative_casimir(self, spectrum_service):
        with pytest.raises(SpectrumParseError):
            spectrum_service.load_spectrum("index,dim,casimir\n0,1,0\n1,2,-3\n")

    def test_missing_trivial(self, spectrum_service):
        with pytest.raises(SpectrumParseError):
            spectrum_service.load_spectrum("index,dim,casimir\n1,2,3\n")

    def test_ragged_index(self, spectrum_service):
        with pytest.raises(SpectrumParseError):
            spectrum_service.load_spectrum("index,dim,casimir\n0;0,1,0\n1,2,3\n")

    def test_metadata_optional(self, spectrum_service):
        spectrum = spectrum_service.load_spectrum("index,dim,casimir\n1,2,3\n0,1,0\n")
        assert spectrum.dim is None
        assert spectrum.m is None
        assert [r.index for r in spectrum.table] == [(0,), (1,)]

    def test_missing_file(self, spectrum_service, tmp_path):
        with pytest.raises(InvalidInputError):
            spectrum_service.load_spectrum_file(tmp_path / "nope.csv")


class TestEnumeration:
    def test_su2_first_irreps(self, spectrum_service, su2):
        listing = spectrum_service.enumerate_irreps(su2, max_count=4)
        assert [(r.dim, r.casimir) for r in listing] == [(1, 0.0), (2, 3.0), (3, 8.0), (4, 15.0)]

    def test_so3_casimir_cutoff(self, spectrum_service, so3):
        listing = spectrum_service.enumerate_irreps(so3, max_casimir=12.0)
        assert [r.casimir for r in listing] == [0.0, 2.0, 6.0, 12.0]
        assert [r.dim for r in listing] == [1, 3, 5, 7]

    def test_torus_order(self, spectrum_service):
        torus = GroupSpectrum.torus(2)
        listing = spectrum_service.enumerate_irreps(torus, max_count=5)
        assert listing[0].index == (0, 0)
        assert all(r.casimir == pytest.approx(FOUR_PI_SQ) for r in listing.irreps[1:5])
        assert [r.index for r in listing.irreps[1:5]] == [(-1, 0), (0, -1), (0, 1), (1, 0)]

    def test_torus_casimir_cutoff(self, spectrum_service):
        listing = spectrum_service.enumerate_irreps(GroupSpectrum.torus(2), max_casimir=2.0 * FOUR_PI_SQ)
        assert len(listing) == 9

    def test_generic_truncated(self, spectrum_service, su3):
        listing = spectrum_service.enumerate_irreps(su3, max_casimir=1000.0)
        assert listing.truncated
        assert len(listing) == len(su3.table)

    def test_generic_not_truncated(self, spectrum_service, su3):
        listing = spectrum_service.enumerate_irreps(su3, max_casimir=3.5)
        assert not listing.truncated
        assert [r.label() for r in listing] == ["0;0", "0;1", "1;0", "1;1", "0;2", "2;0"]

    def test_exactly_one_cutoff(self, spectrum_service, su2):
        with pytest.raises(InvalidInputError):
            spectrum_service.enumerate_irreps(su2)
        with pytest.raises(InvalidInputError):
            spectrum_service.enumerate_irreps(su2, max_casimir=3.0, max_count=3)

    def test_torus_shells(self, spectrum_service):
        terms = spectrum_service.spectral_terms(GroupSpectrum.torus(2), max_norm_sq=5)
        # r_2(k) for k = 0..5: 1, 4, 4, 0, 4, 8
        assert terms.multiplicity.tolist() == [1.0, 4.0, 4.0, 4.0, 8.0]
        assert terms.labels.tolist() == [0, 1, 2, 4, 5]


class TestCharacters:
    def test_identity_is_dimension(self, spectrum_service, su2, so3):
        point = spectrum_service.identity_point(su2)
        for n in range(12):
            assert spectrum_service.character(su2, spectrum_service.irrep(su2, (n,)), point) == complex(n + 1)
            assert spectrum_service.character(so3, spectrum_service.irrep(so3, (n,)), point) == complex(2 * n + 1)

    def test_su2_at_pi(self, spectrum_service, su2):
        point = spectrum_service.class_point(su2, (math.pi,))
        for n in range(8):
            value = spectrum_service.character(su2, spectrum_service.irrep(su2, (n,)), point)
            assert value.real == pytest.approx((-1) ** n * (n + 1), abs=1e-9)

    def test_dirichlet_near_singular(self):
        theta = np.array([1e-6, 0.3, math.pi - 1e-7])
        n = np.arange(20)
        values = dirichlet_kernel(n, theta)
        direct = np.array([[sum(math.cos((k - 2 * j) * th) for j in range(k + 1)) for k in n] for th in theta])
        np.testing.assert_allclose(values, direct, rtol=1e-9, atol=1e-9)

    def test_torus_character(self, spectrum_service):
        torus = GroupSpectrum.torus(2)
        value = spectrum_service.character(torus, spectrum_service.irrep(torus, (1, 2)),
                                           spectrum_service.class_point(torus, (0.25, 0.5)))
        assert value == pytest.approx(np.exp(2j * np.pi * 1.25))

    def test_generic_characters(self, spectrum_service, su3):
        irrep = su3.table[3]
        assert spectrum_service.character(su3, irrep, spectrum_service.identity_point(su3)) == complex(irrep.dim)
        with pytest.raises(CapabilityError):
            spectrum_service.class_point(su3, (0.5,))

    @pytest.mark.parametrize("group", ["su2", "so3"])
    def test_orthogonality(self, spectrum_service, group, request):
        spectrum = request.getfixturevalue(group)
        nodes, weights = spectrum_service.weyl_quadrature(spectrum, 256)
        assert weights.sum() == pytest.approx(1.0, abs=1e-12)
        table = spectrum_service.characters(spectrum, np.arange(21), nodes).real
        gram = (table * weights[:, None]).T @ table
        np.testing.assert_allclose(gram, np.eye(21), atol=1e-10)

    def test_class_point_domain(self, spectrum_service, su2):
        with pytest.raises(InvalidInputError):
            spectrum_service.class_point(su2, (4.0,))
        with pytest.raises(InvalidInputError):
            spectrum_service.class_point(GroupSpectrum.torus(1), (1.0,))


class TestGroupElements:
    def test_inverse(self, spectrum_service, su2, rng):
        for g in spectrum_service.random_elements(su2, 5, rng):
            product = spectrum_service.multiply(g, spectrum_service.invert(g))
            assert spectrum_service.class_of(product).angle == pytest.approx(0.0, abs=1e-7)

    def test_class_of_axis_angle(self, spectrum_service, su2, so3):
        g = spectrum_service.from_axis_angle(su2, (1.0, 2.0, 2.0), 0.7)
        assert spectrum_service.class_of(g).angle == pytest.approx(0.7)
        r = spectrum_service.from_axis_angle(so3, (0.0, 0.0, 1.0), 2.5)
        assert spectrum_service.class_of(r).angle == pytest.approx(2.5)

    def test_so3_sign(self, spectrum_service, so3):
        a = spectrum_service.element(so3, (-1.0, 0.0, 0.0, 0.0))
        assert a.components == (1.0, 0.0, 0.0, 0.0)

    def test_torus_wraps(self, spectrum_service):
        torus = GroupSpectrum.torus(1)
        a = spectrum_service.element(torus, (0.75,))
        b = spectrum_service.element(torus, (0.5,))
        assert spectrum_service.multiply(a, b).components == (0.25,)
        assert spectrum_service.invert(a).components == (0.25,)

    def test_kind_mismatch(self, spectrum_service, su2, so3):
        with pytest.raises(KindMismatchError):
            spectrum_service.multiply(spectrum_service.identity(su2), spectrum_service.identity(so3))

    def test_non_unit_quaternion(self, spectrum_service, su2):
        with pytest.raises(ValueError):
            spectrum_service.element(su2, (1.0, 1.0, 0.0, 0.0))

    def test_generic_has_no_elements(self, spectrum_service, su3):
        with pytest.raises(CapabilityError):
            spectrum_service.identity(su3)


class TestWeylQuadrature:
    @pytest.mark.parametrize("group", ["su2", "so3", "torus:2"])
    def test_weights_sum_to_one(self, spectrum_service, group):
        spectrum = spectrum_service.parse_group_spec(group)
        _, weights = spectrum_service.weyl_quadrature(spectrum, 32)
        assert float(np.sum(weights)) == pytest.approx(1.0, abs=1e-13)

    def test_generic_has_no_geometry(self, spectrum_service, su3):
        with pytest.raises(CapabilityError):
            spectrum_service.weyl_quadrature(su3)
