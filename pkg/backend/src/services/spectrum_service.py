"""
Spectrum service: enumeration, characters, group arithmetic and Weyl integration.
"""
import csv
import io
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
import structlog
from pydantic import BaseModel

from ..config import Settings, get_settings
from ..errors import CapabilityError, InvalidInputError, KindMismatchError, SpectrumParseError
from ..models.spectrum import ClassPoint, GroupElement, GroupKind, GroupSpectrum, IrrepDatum, IrrepListing
from ..utils import lattice, quaternion
from ..utils.quadrature import gauss_legendre, tensor_gauss_legendre

logger = structlog.get_logger(__name__)

FOUR_PI_SQ = 4.0 * math.pi ** 2
# Below this |sin| the quotient formula for characters loses digits
SINGULAR_SIN = 1e-4
DOMAIN_TOLERANCE = 1e-12


class SpectralTerms(BaseModel):
    """Irreps (or torus shells) of a truncated sum as parallel arrays."""

    casimir: np.ndarray
    dim: np.ndarray
    multiplicity: np.ndarray
    labels: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    def __len__(self) -> int:
        return int(self.casimir.size)


class SpectrumService:
    """Service for built-in and tabulated group spectra."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()

    # ------------------------------------------------------------------ parsing

    def parse_group_spec(self, text: str, file: Optional[str] = None) -> GroupSpectrum:
        """Parse ``torus:d``, ``su2``, ``so3`` or ``generic`` (the last needs ``file``)."""
        spec = (text or "").strip().lower()
        if spec == "su2":
            return GroupSpectrum.su2()
        if spec == "so3":
            return GroupSpectrum.so3()
        if spec.startswith("torus"):
            _, _, dim = spec.partition(":")
            try:
                d = int(dim) if dim else 1
            except ValueError:
                raise InvalidInputError(f"bad torus dimension in group spec {text!r}")
            if d < 1:
                raise InvalidInputError("torus dimension must be at least 1")
            return GroupSpectrum.torus(d)
        if spec == "generic":
            if not file:
                raise InvalidInputError("generic groups need a spectrum file")
            return self.load_spectrum_file(file)
        raise InvalidInputError(f"unknown group spec {text!r}; expected torus:d, su2, so3 or generic")

    def load_spectrum_file(self, path: Union[str, Path]) -> GroupSpectrum:
        candidate = Path(path)
        if not candidate.exists():
            fallback = Path(self.settings.spectrum_dir) / candidate
            if not fallback.exists():
                raise InvalidInputError(f"spectrum file not found: {path}")
            candidate = fallback
        with open(candidate, "r", encoding="utf-8") as f:
            spectrum = self.load_spectrum(f, name=candidate.stem)
        logger.info("spectrum loaded", path=str(candidate), rows=len(spectrum.table or ()))
        return spectrum

    def load_spectrum(self, source: Union[TextIO, str], name: str = "") -> GroupSpectrum:
        """
        Read a generic spectrum table.

        The table is UTF-8 CSV with header ``index,dim,casimir``; indices are
        semicolon-separated integers and ``#`` starts a comment. Comments of the form
        ``# group_dim: N``, ``# weyl_order: N`` and ``# rho_sq: x`` set metadata.
        """
        stream = io.StringIO(source) if isinstance(source, str) else source
        metadata: Dict[str, str] = {}
        rows: List[IrrepDatum] = []
        seen = set()
        header_seen = False
        rank: Optional[int] = None

        for line_no, raw in enumerate(stream, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, sep, value = line[1:].partition(":")
                if sep:
                    metadata[key.strip().lower()] = value.strip()
                continue
            fields = next(csv.reader([line]))
            if not header_seen:
                if [f.strip().lower() for f in fields] != ["index", "dim", "casimir"]:
                    raise SpectrumParseError("expected header 'index,dim,casimir'", line=line_no)
                header_seen = True
                continue
            if len(fields) != 3:
                raise SpectrumParseError(f"expected 3 fields, got {len(fields)}", line=line_no)
            try:
                index = tuple(int(part) for part in fields[0].strip().split(";"))
                dim = int(fields[1])
                casimir = float(fields[2])
            except ValueError as e:
                raise SpectrumParseError(f"malformed row: {e}", line=line_no)
            if dim < 1:
                raise SpectrumParseError(f"dimension must be at least 1, got {dim}", line=line_no)
            if not math.isfinite(casimir) or casimir < 0:
                raise SpectrumParseError(f"casimir must be finite and non-negative, got {casimir}", line=line_no)
            if rank is None:
                rank = len(index)
            elif len(index) != rank:
                raise SpectrumParseError(f"index has {len(index)} entries, expected {rank}", line=line_no)
            if index in seen:
                raise SpectrumParseError(f"duplicate index {fields[0].strip()}", line=line_no)
            seen.add(index)
            rows.append(IrrepDatum(index=index, dim=dim, casimir=casimir))

        trivial = [r for r in rows if r.casimir == 0.0]
        if not trivial:
            raise SpectrumParseError("no trivial representation")
        if len(trivial) > 1:
            raise SpectrumParseError("casimir 0 must belong to the trivial representation only")
        if trivial[0].dim != 1:
            raise SpectrumParseError("the trivial representation has dimension 1")

        try:
            group_dim = int(metadata["group_dim"]) if "group_dim" in metadata else None
            weyl_order = int(metadata.get("weyl_order", "1"))
            rho_sq = float(metadata["rho_sq"]) if "rho_sq" in metadata else None
        except ValueError as e:
            raise SpectrumParseError(f"bad metadata: {e}")
        if group_dim is None:
            logger.warning("generic spectrum has no group_dim metadata", name=name)

        rows.sort(key=lambda r: (r.casimir, r.index))
        return GroupSpectrum(
            kind=GroupKind.GENERIC,
            dim=group_dim,
            rank=rank or 1,
            weyl_order=weyl_order,
            rho_sq=rho_sq,
            name=name,
            table=tuple(rows),
        )

    # -------------------------------------------------------------- enumeration

    def irrep(self, spectrum: GroupSpectrum, index: Sequence[int]) -> IrrepDatum:
        """Irrep datum for a label."""
        index = tuple(int(i) for i in index)
        if spectrum.kind == GroupKind.SU2:
            (n,) = self._rank_one(index)
            return IrrepDatum(index=(n,), dim=n + 1, casimir=float(n * (n + 2)))
        if spectrum.kind == GroupKind.SO3:
            (n,) = self._rank_one(index)
            return IrrepDatum(index=(n,), dim=2 * n + 1, casimir=float(n * (n + 1)))
        if spectrum.kind == GroupKind.TORUS:
            if len(index) != spectrum.rank:
                raise InvalidInputError(f"torus label needs {spectrum.rank} entries")
            return IrrepDatum(index=index, dim=1, casimir=FOUR_PI_SQ * sum(i * i for i in index))
        for row in spectrum.table or ():
            if row.index == index:
                return row
        raise InvalidInputError(f"irrep {index} not in the spectrum table")

    @staticmethod
    def _rank_one(index: Tuple[int, ...]) -> Tuple[int]:
        if len(index) != 1 or index[0] < 0:
            raise InvalidInputError(f"label must be a single non-negative integer, got {index}")
        return (index[0],)

    def enumerate_irreps(
        self,
        spectrum: GroupSpectrum,
        max_casimir: Optional[float] = None,
        max_count: Optional[int] = None,
    ) -> IrrepListing:
        """All irreps up to a Casimir bound, or the first ``max_count`` of them, sorted by (casimir, index)."""
        if (max_casimir is None) == (max_count is None):
            raise InvalidInputError("give exactly one of max_casimir and max_count")
        if max_casimir is not None and not max_casimir > 0:
            raise InvalidInputError("max_casimir must be positive")
        if max_count is not None and max_count < 1:
            raise InvalidInputError("max_count must be positive")

        if spectrum.kind == GroupKind.GENERIC:
            table = list(spectrum.table or ())
            if max_count is not None:
                return IrrepListing(irreps=table[:max_count], truncated=max_count > len(table))
            chosen = [r for r in table if r.casimir <= max_casimir]
            truncated = max_casimir > table[-1].casimir
            if truncated:
                logger.warning("spectrum truncated", requested=max_casimir, available=table[-1].casimir)
            return IrrepListing(irreps=chosen, truncated=truncated)

        if spectrum.kind in (GroupKind.SU2, GroupKind.SO3):
            if max_count is not None:
                n = np.arange(max_count)
            else:
                n = np.arange(self._rank_one_label_bound(spectrum, max_casimir) + 1)
            return IrrepListing(irreps=[self.irrep(spectrum, (int(k),)) for k in n])

        d = spectrum.rank
        if max_casimir is not None:
            points = lattice.ball_points(d, int(math.floor(max_casimir / FOUR_PI_SQ)))
            points = points[FOUR_PI_SQ * np.sum(points * points, axis=1) <= max_casimir]
        else:
            bound = 1
            while int(np.sum(lattice.shell_counts(d, bound))) < max_count:
                bound *= 2
            counts = np.cumsum(lattice.shell_counts(d, bound))
            shell = int(np.searchsorted(counts, max_count))
            points = lattice.ball_points(d, shell)
        norms = np.sum(points * points, axis=1)
        order = np.lexsort(tuple(points[:, j] for j in reversed(range(d))) + (norms,))
        points = points[order]
        if max_count is not None:
            points = points[:max_count]
        return IrrepListing(irreps=[self.irrep(spectrum, tuple(int(x) for x in p)) for p in points])

    def _rank_one_label_bound(self, spectrum: GroupSpectrum, max_casimir: float) -> int:
        """Largest label n with casimir(n) <= max_casimir."""
        shift = 1.0 if spectrum.kind == GroupKind.SU2 else 0.5
        n = int(math.floor(math.sqrt(max_casimir + shift * shift) - shift))
        casimir = self._casimir_of_label(spectrum)
        while n >= 0 and casimir(n) > max_casimir:
            n -= 1
        while casimir(n + 1) <= max_casimir:
            n += 1
        return max(n, 0)

    @staticmethod
    def _casimir_of_label(spectrum: GroupSpectrum):
        if spectrum.kind == GroupKind.SU2:
            return lambda n: float(n * (n + 2))
        return lambda n: float(n * (n + 1))

    def spectral_terms(
        self,
        spectrum: GroupSpectrum,
        label_count: Optional[int] = None,
        max_norm_sq: Optional[int] = None,
        points: bool = False,
    ) -> SpectralTerms:
        """
        Arrays for a truncated sum.

        Rank-one groups take the first ``label_count`` labels. Tori take every lattice
        point with ``|n|^2 <= max_norm_sq``, compressed into shells unless ``points``
        is requested. Generic spectra return their whole table.
        """
        if spectrum.kind in (GroupKind.SU2, GroupKind.SO3):
            n = np.arange(label_count, dtype=np.int64)
            nf = n.astype(float)
            if spectrum.kind == GroupKind.SU2:
                dim, casimir = nf + 1.0, nf * (nf + 2.0)
            else:
                dim, casimir = 2.0 * nf + 1.0, nf * (nf + 1.0)
            return SpectralTerms(casimir=casimir, dim=dim, multiplicity=np.ones_like(nf), labels=n)
        if spectrum.kind == GroupKind.TORUS:
            if points:
                pts = lattice.ball_points(spectrum.rank, max_norm_sq)
                norms = np.sum(pts * pts, axis=1).astype(float)
                ones = np.ones(len(pts))
                return SpectralTerms(casimir=FOUR_PI_SQ * norms, dim=ones, multiplicity=ones, labels=pts)
            counts = lattice.shell_counts(spectrum.rank, max_norm_sq)
            k = np.flatnonzero(counts)
            return SpectralTerms(
                casimir=FOUR_PI_SQ * k.astype(float),
                dim=np.ones(k.size),
                multiplicity=counts[k].astype(float),
                labels=k,
            )
        table = spectrum.table or ()
        return SpectralTerms(
            casimir=np.array([r.casimir for r in table]),
            dim=np.array([float(r.dim) for r in table]),
            multiplicity=np.ones(len(table)),
            labels=np.arange(len(table)),
        )

    # --------------------------------------------------------------- characters

    def class_point(self, spectrum: GroupSpectrum, coordinates: Sequence[float]) -> ClassPoint:
        """Validated class point in the fundamental domain of ``spectrum``."""
        coords = tuple(float(c) for c in coordinates)
        if spectrum.kind in (GroupKind.SU2, GroupKind.SO3):
            if len(coords) != 1 or not -DOMAIN_TOLERANCE <= coords[0] <= math.pi + DOMAIN_TOLERANCE:
                raise InvalidInputError(f"class angle must lie in [0, pi], got {coords}")
            return ClassPoint(coordinates=(min(max(coords[0], 0.0), math.pi),))
        if spectrum.kind == GroupKind.TORUS:
            if len(coords) != spectrum.rank or any(not 0.0 <= c < 1.0 for c in coords):
                raise InvalidInputError(f"torus class needs {spectrum.rank} coordinates in [0, 1)")
            return ClassPoint(coordinates=coords)
        if len(coords) != 1 or coords[0] != 0.0:
            raise CapabilityError("generic spectra only know the identity class")
        return ClassPoint(coordinates=(0.0,))

    def identity_point(self, spectrum: GroupSpectrum) -> ClassPoint:
        return ClassPoint(coordinates=(0.0,) * (spectrum.rank if spectrum.kind == GroupKind.TORUS else 1))

    def character(self, spectrum: GroupSpectrum, irrep: IrrepDatum, point: ClassPoint) -> complex:
        """``chi_pi`` at a class, exactly ``d_pi`` at the identity."""
        if not spectrum.supports_characters:
            if all(c == 0.0 for c in point.coordinates):
                return complex(irrep.dim)
            raise CapabilityError("generic spectra cannot evaluate characters away from the identity")
        labels = np.array([irrep.index], dtype=np.int64)
        if spectrum.kind != GroupKind.TORUS:
            labels = labels[:, 0]
        return complex(self.characters(spectrum, labels, np.array([point.coordinates]))[0, 0])

    def characters(self, spectrum: GroupSpectrum, labels: np.ndarray, coords: np.ndarray) -> np.ndarray:
        """
        Character table of shape ``(points, labels)``.

        ``labels`` are integers for rank-one groups and ``(N, d)`` lattice points on
        tori; ``coords`` has shape ``(points, rank)``.
        """
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        if spectrum.kind == GroupKind.TORUS:
            phase = 2.0 * np.pi * (coords @ np.atleast_2d(labels).T.astype(float))
            return np.exp(1j * phase)
        if spectrum.kind == GroupKind.SU2:
            return dirichlet_kernel(np.asarray(labels), coords[:, 0]).astype(complex)
        if spectrum.kind == GroupKind.SO3:
            return dirichlet_kernel(2 * np.asarray(labels), 0.5 * coords[:, 0]).astype(complex)
        raise CapabilityError("generic spectra cannot evaluate characters away from the identity")

    # ------------------------------------------------------------ group elements

    def identity(self, spectrum: GroupSpectrum) -> GroupElement:
        if spectrum.kind == GroupKind.TORUS:
            return GroupElement(kind=GroupKind.TORUS, components=(0.0,) * spectrum.rank)
        if spectrum.kind == GroupKind.GENERIC:
            raise CapabilityError("generic spectra have no group elements")
        return GroupElement(kind=spectrum.kind, components=(1.0, 0.0, 0.0, 0.0))

    def element(self, spectrum: GroupSpectrum, components: Sequence[float]) -> GroupElement:
        comps = np.asarray(components, dtype=float)
        if spectrum.kind == GroupKind.SO3:
            comps = quaternion.canonical_sign(comps)
        if spectrum.kind == GroupKind.GENERIC:
            raise CapabilityError("generic spectra have no group elements")
        return GroupElement(kind=spectrum.kind, components=tuple(comps))

    def from_axis_angle(self, spectrum: GroupSpectrum, axis: Sequence[float], angle: float) -> GroupElement:
        """SU(2) element ``(cos angle, sin angle * axis)``; for SO(3) the rotation by ``angle`` about ``axis``."""
        half = angle if spectrum.kind == GroupKind.SU2 else 0.5 * angle
        if spectrum.kind not in (GroupKind.SU2, GroupKind.SO3):
            raise CapabilityError("axis-angle elements exist for SU(2) and SO(3) only")
        return self.element(spectrum, quaternion.from_axis_angle(axis, half))

    def random_elements(self, spectrum: GroupSpectrum, count: int, rng: np.random.Generator) -> List[GroupElement]:
        """Haar-random elements."""
        if spectrum.kind == GroupKind.TORUS:
            return [GroupElement(kind=GroupKind.TORUS, components=tuple(x)) for x in rng.random((count, spectrum.rank))]
        quats = quaternion.random_unit(count, rng)
        return [self.element(spectrum, q) for q in quats]

    @staticmethod
    def _check_kinds(a: GroupElement, b: GroupElement) -> None:
        if a.kind != b.kind or len(a.components) != len(b.components):
            raise KindMismatchError(f"cannot combine {a.kind.value} and {b.kind.value} elements")

    def multiply(self, a: GroupElement, b: GroupElement) -> GroupElement:
        self._check_kinds(a, b)
        if a.kind == GroupKind.TORUS:
            return GroupElement(kind=a.kind, components=tuple(a.array() + b.array()))
        product = quaternion.multiply(a.array(), b.array())
        product = product / np.linalg.norm(product)
        if a.kind == GroupKind.SO3:
            product = quaternion.canonical_sign(product)
        return GroupElement(kind=a.kind, components=tuple(product))

    def invert(self, a: GroupElement) -> GroupElement:
        if a.kind == GroupKind.TORUS:
            return GroupElement(kind=a.kind, components=tuple(-a.array()))
        inverse = quaternion.conjugate(a.array())
        if a.kind == GroupKind.SO3:
            inverse = quaternion.canonical_sign(inverse)
        return GroupElement(kind=a.kind, components=tuple(inverse))

    def class_of(self, a: GroupElement) -> ClassPoint:
        if a.kind == GroupKind.TORUS:
            return ClassPoint(coordinates=a.components)
        if a.kind == GroupKind.SU2:
            return ClassPoint(coordinates=(float(quaternion.su2_angle(a.array())),))
        return ClassPoint(coordinates=(float(quaternion.so3_angle(a.array())),))

    def class_representative(self, spectrum: GroupSpectrum, angles: np.ndarray) -> np.ndarray:
        """Quaternions of the rotations about the z axis in the classes ``angles``."""
        angles = np.asarray(angles, dtype=float)
        half = angles if spectrum.kind == GroupKind.SU2 else 0.5 * angles
        zeros = np.zeros_like(half)
        return np.stack([np.cos(half), zeros, zeros, np.sin(half)], axis=-1)

    def class_angles(self, spectrum: GroupSpectrum, quats: np.ndarray) -> np.ndarray:
        if spectrum.kind == GroupKind.SU2:
            return quaternion.su2_angle(quats)
        return quaternion.so3_angle(quats)

    # ---------------------------------------------------------- Weyl integration

    def weyl_weight(self, spectrum: GroupSpectrum, point: Union[ClassPoint, np.ndarray]):
        """Density of the class coordinates under Haar measure; a float for a single ClassPoint."""
        if isinstance(point, ClassPoint):
            return float(self.weyl_weight(spectrum, np.array([point.coordinates]))[0])
        coords = np.atleast_2d(np.asarray(point, dtype=float))
        if spectrum.kind == GroupKind.SU2:
            return (2.0 / np.pi) * np.sin(coords[:, 0]) ** 2
        if spectrum.kind == GroupKind.SO3:
            return (2.0 / np.pi) * np.sin(0.5 * coords[:, 0]) ** 2
        if spectrum.kind == GroupKind.TORUS:
            return np.ones(coords.shape[0])
        raise CapabilityError("generic spectra carry no class geometry")

    def weyl_quadrature(self, spectrum: GroupSpectrum, order: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """Class-coordinate nodes ``(points, rank)`` and Haar weights summing to 1."""
        order = order or self.settings.quadrature_order
        if spectrum.kind in (GroupKind.SU2, GroupKind.SO3):
            nodes, weights = gauss_legendre(order, 0.0, math.pi)
            nodes = nodes[:, None]
            return nodes, weights * self.weyl_weight(spectrum, nodes)
        if spectrum.kind == GroupKind.TORUS:
            if order ** spectrum.rank > self.settings.hard_max_terms:
                raise InvalidInputError("tensor quadrature grid exceeds hard_max_terms")
            return tensor_gauss_legendre(order, spectrum.rank)
        raise CapabilityError("generic spectra carry no class geometry")


def dirichlet_kernel(n: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """
    ``D_n(theta) = sin((n+1) theta) / sin(theta) = sum_k exp(i (n - 2k) theta)``.

    Near ``sin(theta) = 0`` the cosine sum is used, accumulated separately over
    even and odd n.
    """
    n = np.asarray(n, dtype=np.int64)
    theta = np.asarray(theta, dtype=float)
    s = np.sin(theta)
    regular = np.abs(s) >= SINGULAR_SIN
    out = np.empty((theta.size, n.size))
    if regular.any():
        th = theta[regular][:, None]
        out[regular] = np.sin((n[None, :] + 1) * th) / np.sin(th)
    if (~regular).any():
        n_max = int(n.max()) if n.size else 0
        for row in np.flatnonzero(~regular):
            c = np.cos(np.arange(n_max + 1) * theta[row])
            even = 1.0 + 2.0 * np.concatenate([[0.0], np.cumsum(c[2::2])])
            odd = 2.0 * np.cumsum(c[1::2])
            values = np.where(n % 2 == 0, even[np.minimum(n // 2, even.size - 1)], 0.0)
            if odd.size:
                values = np.where(n % 2 == 1, odd[np.minimum(n // 2, odd.size - 1)], values)
            out[row] = values
    return out
