"""Bounded domains and the geometric quantities used by the bound formulas.

Rectangles (boxes) occupy ``[0, L_1] x ... x [0, L_d]``, disks are centred at
the origin, and masks are boolean cell arrays whose cell ``(i, j, ...)``
occupies ``[i h, (i+1) h] x [j h, (j+1) h] x ...``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EmptyDomain, InvalidDimension, InvalidDomain


def _check_dimension(d: int) -> int:
    if int(d) != d or d <= 0:
        raise InvalidDimension(f"dimension must be a positive integer, got {d!r}")
    return int(d)


def unit_sphere_area(d: int) -> float:
    """Surface measure of the unit sphere S^{d-1}, i.e. 2 pi^{d/2} / Gamma(d/2)."""
    d = _check_dimension(d)
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


def unit_ball_volume(d: int) -> float:
    """Volume of the unit ball in R^d, pi^{d/2} / Gamma(d/2 + 1)."""
    d = _check_dimension(d)
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


@dataclass(frozen=True)
class GeometryMeasures:
    volume: float
    boundary_area: float
    inertia: float
    centroid: tuple[float, ...]

    @property
    def specific_surface(self) -> float:
        """Ar(Omega) / Vol(Omega)."""
        return self.boundary_area / self.volume


@dataclass(frozen=True)
class DomainSpec:
    """A bounded region. Build instances with :meth:`rectangle`, :meth:`disk` or :meth:`mask`."""

    kind: str
    dimension: int
    lengths: tuple[float, ...] = ()
    radius: float = 0.0
    cells: np.ndarray | None = field(default=None, compare=False, repr=False)
    cell_size: float = 0.0

    def __post_init__(self):
        _check_dimension(self.dimension)
        if self.kind == "rectangle":
            if len(self.lengths) != self.dimension:
                raise InvalidDomain(
                    f"rectangle needs {self.dimension} side lengths, got {len(self.lengths)}")
            if not all(math.isfinite(L) and L > 0 for L in self.lengths):
                raise InvalidDomain(f"side lengths must be positive, got {self.lengths}")
        elif self.kind == "disk":
            if self.dimension != 2:
                raise InvalidDimension("disk domains exist only for d = 2")
            if not (math.isfinite(self.radius) and self.radius > 0):
                raise InvalidDomain(f"disk radius must be positive, got {self.radius}")
        elif self.kind == "mask":
            if self.cells is None or self.cells.ndim != self.dimension:
                raise InvalidDimension("mask array rank must equal the dimension")
            if not (math.isfinite(self.cell_size) and self.cell_size > 0):
                raise InvalidDomain(f"mask cell size must be positive, got {self.cell_size}")
            if not self.cells.any():
                raise EmptyDomain("mask has no interior cell")
        else:
            raise InvalidDomain(f"unknown domain kind {self.kind!r}")

    @classmethod
    def rectangle(cls, *lengths: float) -> "DomainSpec":
        if len(lengths) == 1 and isinstance(lengths[0], (list, tuple)):
            lengths = tuple(lengths[0])
        lengths = tuple(float(L) for L in lengths)
        return cls(kind="rectangle", dimension=len(lengths), lengths=lengths)

    @classmethod
    def disk(cls, radius: float) -> "DomainSpec":
        return cls(kind="disk", dimension=2, radius=float(radius))

    @classmethod
    def mask(cls, cells: Sequence | np.ndarray, cell_size: float) -> "DomainSpec":
        arr = np.array(cells, dtype=bool)
        arr.setflags(write=False)
        return cls(kind="mask", dimension=arr.ndim, cells=arr, cell_size=float(cell_size))

    @property
    def bounding_box(self) -> tuple[tuple[float, float], ...]:
        if self.kind == "rectangle":
            return tuple((0.0, L) for L in self.lengths)
        if self.kind == "disk":
            return ((-self.radius, self.radius),) * 2
        return tuple((0.0, s * self.cell_size) for s in self.cells.shape)

    @property
    def smooth_boundary(self) -> bool:
        """False when the discretization resolves the boundary by staircase cells."""
        return self.kind == "rectangle"

    def scaled(self, t: float) -> "DomainSpec":
        """The dilated domain t * Omega."""
        if self.kind == "rectangle":
            return DomainSpec.rectangle(*(t * L for L in self.lengths))
        if self.kind == "disk":
            return DomainSpec.disk(t * self.radius)
        return DomainSpec.mask(self.cells, t * self.cell_size)

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean membership for an array of points with trailing axis of length d."""
        pts = np.asarray(points, dtype=float)
        if self.kind == "rectangle":
            L = np.asarray(self.lengths)
            return np.all((pts >= 0) & (pts <= L), axis=-1)
        if self.kind == "disk":
            return np.sum(pts**2, axis=-1) <= self.radius**2
        idx = np.floor(pts / self.cell_size).astype(int)
        shape = np.asarray(self.cells.shape)
        ok = np.all((idx >= 0) & (idx < shape), axis=-1)
        out = np.zeros(ok.shape, dtype=bool)
        clipped = np.clip(idx, 0, shape - 1)
        out[ok] = self.cells[tuple(clipped[ok].T)]
        return out


def _mask_centers(domain: DomainSpec) -> np.ndarray:
    idx = np.argwhere(domain.cells)
    return (idx + 0.5) * domain.cell_size


def _mask_exposed_faces(cells: np.ndarray) -> int:
    padded = np.pad(cells, 1, constant_values=False)
    count = 0
    for axis in range(cells.ndim):
        count += int(np.count_nonzero(np.diff(padded.astype(np.int8), axis=axis)))
    return count


def second_moment(domain: DomainSpec, center: Sequence[float]) -> float:
    """Integral of |x - center|^2 over the domain."""
    c = np.asarray(center, dtype=float)
    if c.shape != (domain.dimension,):
        raise InvalidDimension("center dimension does not match the domain")
    if domain.kind == "rectangle":
        L = np.asarray(domain.lengths)
        vol = float(np.prod(L))
        per_axis = ((L - c) ** 3 + c**3) / 3.0
        return float(sum(per_axis[i] * vol / L[i] for i in range(domain.dimension)))
    if domain.kind == "disk":
        R = domain.radius
        return math.pi * R**4 / 2 + math.pi * R**2 * float(c @ c)
    h = domain.cell_size
    d = domain.dimension
    centers = _mask_centers(domain)
    offsets = np.sum((centers - c) ** 2, axis=1)
    return float(h**d * np.sum(offsets) + len(centers) * d * h ** (d + 2) / 12.0)


def measure(domain: DomainSpec) -> GeometryMeasures:
    """Volume, boundary area, inertia I(Omega) and centroid.

    Inertia is min over y of the integral of |x - y|^2, attained at the
    centroid. For masks the boundary area is the exposed-face count times the
    face area.
    """
    d = domain.dimension
    if domain.kind == "rectangle":
        L = np.asarray(domain.lengths)
        vol = float(np.prod(L))
        if d == 1:
            area = 2.0
        else:
            area = float(sum(2.0 * vol / L[i] for i in range(d)))
        centroid = tuple(float(x) for x in L / 2)
    elif domain.kind == "disk":
        R = domain.radius
        vol, area, centroid = math.pi * R**2, 2 * math.pi * R, (0.0, 0.0)
    else:
        h = domain.cell_size
        centers = _mask_centers(domain)
        if len(centers) == 0:
            raise EmptyDomain("mask has no interior cell")
        vol = len(centers) * h**d
        area = _mask_exposed_faces(domain.cells) * h ** (d - 1)
        centroid = tuple(float(x) for x in centers.mean(axis=0))
    return GeometryMeasures(volume=vol, boundary_area=area,
                            inertia=second_moment(domain, centroid), centroid=centroid)
