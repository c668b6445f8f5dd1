"""Sampled transverse fields and the N x N lattice of truncated Gaussian cells.

Array convention: ``amplitude[row, col]``; rows run along y (top to bottom,
lattice index ``j``), columns along x (left to right, lattice index ``k``).
Pixel and cell centres are placed symmetrically about the grid centre.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from latticeqc.errors import DimensionError

DEFAULT_CELL_PITCH = 400e-6
DEFAULT_PX_PER_CELL = 64


@dataclass(frozen=True)
class LatticeLayout:
    """Geometry binding lattice indices to pixel blocks of a square grid.

    Parameters
    ----------
    n : int
        Cells per axis.
    cell_pitch : float
        Cell width and height [m].
    waist : float
        Gaussian 1/e^2 intensity radius [m].
    grid_px : int
        Samples per axis.
    px_pitch : float
        Sample spacing [m].
    """

    n: int
    cell_pitch: float
    waist: float
    grid_px: int
    px_pitch: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        if self.cell_pitch <= 0 or self.px_pitch <= 0 or self.waist <= 0:
            raise ValueError("cell_pitch, px_pitch and waist must be positive")
        if not self.waist < self.cell_pitch / 2:
            raise ValueError("waist must be smaller than half the cell pitch")
        if self.grid_px % self.n:
            raise ValueError(f"grid_px={self.grid_px} is not divisible by n={self.n}")
        ratio = self.cell_pitch / self.px_pitch
        if abs(ratio - round(ratio)) > 1e-9 * ratio:
            raise ValueError("cell_pitch must be an integer multiple of px_pitch")
        spare = self.grid_px - self.n * round(ratio)
        if spare < 0:
            raise ValueError("lattice does not fit inside the grid")
        if spare % 2:
            raise ValueError("lattice must sit an integer number of pixels from each edge")

    @classmethod
    def create(
        cls,
        n: int,
        cell_pitch: float = DEFAULT_CELL_PITCH,
        waist: float | None = None,
        px_per_cell: int = DEFAULT_PX_PER_CELL,
        pad: int = 1,
    ) -> "LatticeLayout":
        """Build a layout from cell count and pitch.

        ``waist`` defaults to a quarter of the pitch. ``pad`` multiplies the
        grid size; ``pad=2`` leaves a guard band of half the grid around the
        lattice, needed whenever light is propagated.
        """
        if waist is None:
            waist = cell_pitch / 4
        return cls(
            n=n,
            cell_pitch=cell_pitch,
            waist=waist,
            grid_px=pad * n * px_per_cell,
            px_pitch=cell_pitch / px_per_cell,
        )

    @property
    def px_per_cell(self) -> int:
        return round(self.cell_pitch / self.px_pitch)

    @property
    def offset_px(self) -> int:
        """Pixels between the grid edge and the first lattice cell."""
        return (self.grid_px - self.n * self.px_per_cell) // 2

    @property
    def extent(self) -> float:
        """Physical width of the lattice [m]."""
        return self.n * self.cell_pitch

    def coords(self) -> np.ndarray:
        """Pixel-centre coordinates along either axis [m]."""
        return (np.arange(self.grid_px) - (self.grid_px - 1) / 2) * self.px_pitch

    def cell_slice(self, index: int) -> slice:
        """Pixel range of lattice row or column ``index``."""
        _check_index(self, index)
        start = self.offset_px + index * self.px_per_cell
        return slice(start, start + self.px_per_cell)

    def lattice_slice(self) -> slice:
        return slice(self.offset_px, self.offset_px + self.n * self.px_per_cell)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "cell_pitch": self.cell_pitch,
            "waist": self.waist,
            "grid_px": self.grid_px,
            "px_pitch": self.px_pitch,
        }


@dataclass(frozen=True, eq=False)
class Field:
    """Complex amplitude on a square grid with spacing ``px_pitch`` [m].

    The stored array is a read-only copy.
    """

    amplitude: np.ndarray
    px_pitch: float

    def __post_init__(self):
        a = np.array(self.amplitude, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"field must be a square 2D grid, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("field contains NaN or Inf")
        a.setflags(write=False)
        object.__setattr__(self, "amplitude", a)

    @property
    def grid_px(self) -> int:
        return self.amplitude.shape[0]

    def intensity(self) -> np.ndarray:
        return np.abs(self.amplitude) ** 2

    def power(self) -> float:
        return float(np.sum(self.intensity()) * self.px_pitch**2)

    def inner(self, other: "Field") -> complex:
        """Overlap integral <self|other>."""
        return complex(np.vdot(self.amplitude, other.amplitude) * self.px_pitch**2)


def _check_index(layout: LatticeLayout, *indices: int) -> None:
    for i in indices:
        if not 0 <= i < layout.n:
            raise IndexError(f"lattice index {i} out of range for n={layout.n}")


def cell_center(layout: LatticeLayout, j: int, k: int) -> tuple[float, float]:
    """Physical centre ``(x, y)`` of the cell in row ``j``, column ``k``."""
    _check_index(layout, j, k)
    half = (layout.n - 1) / 2
    return ((k - half) * layout.cell_pitch, (j - half) * layout.cell_pitch)


def cell_profile(layout: LatticeLayout, index: int) -> np.ndarray:
    """1D Gaussian truncated to cell ``index``, unit power along one axis."""
    _check_index(layout, index)
    centre = (index - (layout.n - 1) / 2) * layout.cell_pitch
    x = layout.coords()
    g = np.zeros(layout.grid_px)
    sl = layout.cell_slice(index)
    g[sl] = np.exp(-((x[sl] - centre) ** 2) / layout.waist**2)
    return g / math.sqrt(np.sum(g**2) * layout.px_pitch)


def gaussian_cell_mode(layout: LatticeLayout, j: int, k: int) -> Field:
    """Unit-power Gaussian localized in cell (row ``j``, column ``k``), zero elsewhere."""
    return Field(np.outer(cell_profile(layout, j), cell_profile(layout, k)), layout.px_pitch)


def profile_sum(layout: LatticeLayout, weights=None) -> np.ndarray:
    """Weighted sum of the 1D cell profiles along one axis."""
    w = np.ones(layout.n) if weights is None else np.asarray(weights)
    out = np.zeros(layout.grid_px, dtype=np.result_type(w, float))
    for i in range(layout.n):
        out += w[i] * cell_profile(layout, i)
    return out


def uniform_lattice(layout: LatticeLayout) -> Field:
    """Equal-weight, zero-phase superposition of all N^2 cell modes."""
    g = profile_sum(layout)
    return Field(np.outer(g, g) / layout.n, layout.px_pitch)


def cell_powers(field: Field, layout: LatticeLayout) -> np.ndarray:
    """Power inside each lattice cell, indexed ``[j, k]``."""
    lat = layout.lattice_slice()
    ppc = layout.px_per_cell
    block = field.intensity()[lat, lat].reshape(layout.n, ppc, layout.n, ppc)
    return block.sum(axis=(1, 3)) * field.px_pitch**2


def cell_phases(field: Field, layout: LatticeLayout) -> np.ndarray:
    """Phase of the field at the pixel nearest each cell centre, ``[j, k]``."""
    half = layout.px_per_cell // 2
    idx = [layout.cell_slice(i).start + half for i in range(layout.n)]
    return np.angle(field.amplitude[np.ix_(idx, idx)])


def cell_power_fraction(layout: LatticeLayout) -> float:
    """Fraction of an untruncated Gaussian's power that falls inside its cell."""
    per_axis = math.erf(math.sqrt(2) * (layout.cell_pitch / 2) / layout.waist)
    return per_axis**2
