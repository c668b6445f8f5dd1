"""Optical multiplier pipeline: two modulation planes, a cylindrical lens, readout.

In ``ideal`` mode the planes are perfectly imaged onto each other and the
lens is an exact unitary DFT along x, so readout reproduces ``|M u|^2``
exactly. ``physical`` mode adds band-limited angular-spectrum propagation
between the modulators and lets the unfocused y direction spread over the
lens distance before the camera.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from latticeqc.errors import DimensionError, SamplingError
from latticeqc.gates import as_gate, as_state
from latticeqc.lattice import (
    DEFAULT_CELL_PITCH,
    DEFAULT_PX_PER_CELL,
    Field,
    LatticeLayout,
    profile_sum,
    cell_profile,
)

HENE_WAVELENGTH = 633e-9
DEFAULT_LENS_DISTANCE = 0.15
DEFAULT_EXTENT = 16 * DEFAULT_CELL_PITCH
PHYSICAL_PX_PER_CELL = 32
MODES = ("ideal", "physical")


@dataclass(frozen=True)
class PipelineConfig:
    """Pipeline settings.

    ``propagation_distance`` is how far the unfocused y direction travels
    after the cylindrical lens; ``relay_distance`` is the free-space gap
    substituted for each imaging relay. Both are used only in physical mode.
    ``zero_order_halfwidth`` counts DFT columns kept on either side of zero
    frequency.
    """

    layout: LatticeLayout
    mode: str = "ideal"
    wavelength: float = HENE_WAVELENGTH
    propagation_distance: float = DEFAULT_LENS_DISTANCE
    relay_distance: float = 0.0
    zero_order_halfwidth: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")
        if self.propagation_distance < 0 or self.relay_distance < 0:
            raise ValueError("propagation distances must be non-negative")
        if int(self.zero_order_halfwidth) != self.zero_order_halfwidth or self.zero_order_halfwidth < 0:
            raise ValueError("zero_order_halfwidth must be a non-negative integer")
        if 2 * self.zero_order_halfwidth + 1 > self.layout.grid_px:
            raise ValueError("zero-order window is wider than the grid")

    @classmethod
    def create(
        cls,
        n: int,
        mode: str = "ideal",
        cell_pitch: float | None = None,
        waist: float | None = None,
        px_per_cell: int | None = None,
        pad: int | None = None,
        extent: float = DEFAULT_EXTENT,
        **kwargs,
    ) -> "PipelineConfig":
        """Config for an ``n``-cell lattice.

        The cell pitch defaults to ``extent / n``, so every dimension shares
        one physical aperture (400 um cells at n = 16). Physical mode
        defaults to 32 pixels per cell and a guard band (``pad=2``) so that
        propagated light neither aliases nor wraps around the periodic grid.
        """
        physical = mode == "physical"
        if cell_pitch is None:
            cell_pitch = extent / n
        if px_per_cell is None:
            px_per_cell = PHYSICAL_PX_PER_CELL if physical else DEFAULT_PX_PER_CELL
        if pad is None:
            pad = 2 if physical else 1
        layout = LatticeLayout.create(n, cell_pitch, waist, px_per_cell, pad)
        return cls(layout=layout, mode=mode, **kwargs)

    def with_layout(self, layout: LatticeLayout) -> "PipelineConfig":
        return replace(self, layout=layout)

    def to_dict(self) -> dict:
        return {
            "layout": self.layout.to_dict(),
            "mode": self.mode,
            "wavelength": self.wavelength,
            "propagation_distance": self.propagation_distance,
            "relay_distance": self.relay_distance,
            "zero_order_halfwidth": self.zero_order_halfwidth,
        }


@dataclass(frozen=True, eq=False)
class ReadoutResult:
    """Camera readout of the zero-order column.

    ``row_intensities[j]`` is the power in lattice row band ``j`` within the
    kept zero-order columns; ``zero_order_column`` is the complex field at
    zero spatial frequency along the full y axis.
    """

    row_intensities: np.ndarray
    probabilities: np.ndarray
    zero_order_column: np.ndarray

    def to_dict(self) -> dict:
        return {
            "row_intensities": [float(x) for x in self.row_intensities],
            "probabilities": [float(x) for x in self.probabilities],
        }


def _check_layout(field: Field, layout: LatticeLayout) -> None:
    if field.grid_px != layout.grid_px or not math.isclose(field.px_pitch, layout.px_pitch):
        raise DimensionError(
            f"field grid ({field.grid_px} px at {field.px_pitch:g} m) does not match the layout "
            f"({layout.grid_px} px at {layout.px_pitch:g} m)"
        )


def encode_vector(layout: LatticeLayout, u) -> Field:
    """First modulation plane: weight every cell in column ``k`` by ``u[k]``.

    Each row of the lattice holds a copy of ``u``; the total power is 1 for
    a normalized ``u``.
    """
    u = as_state(u, normalized=True)
    if u.size != layout.n:
        raise DimensionError(f"vector has length {u.size}, lattice has n={layout.n}")
    gx = profile_sum(layout, u)
    gy = profile_sum(layout)
    return Field(np.outer(gy, gx) / math.sqrt(layout.n), layout.px_pitch)


def matrix_mask(m, layout: LatticeLayout) -> np.ndarray:
    """Piecewise-constant modulator pattern: ``m[j, k]`` over cell (j, k), 0 outside the lattice."""
    m = as_gate(m)
    if m.shape[0] != layout.n:
        raise DimensionError(f"matrix is {m.shape[0]}x{m.shape[0]}, lattice has n={layout.n}")
    ppc = layout.px_per_cell
    mask = np.zeros((layout.grid_px, layout.grid_px), dtype=np.complex128)
    lat = layout.lattice_slice()
    mask[lat, lat] = np.kron(m, np.ones((ppc, ppc)))
    return mask


def encode_matrix(field: Field, m, layout: LatticeLayout) -> Field:
    """Second modulation plane: multiply cell (row j, column k) by ``m[j, k]``."""
    _check_layout(field, layout)
    return Field(field.amplitude * matrix_mask(m, layout), field.px_pitch)


def cylindrical_transform(field: Field) -> Field:
    """Unitary 1D DFT along x for every row; zero frequency lands on column ``grid_px // 2``.

    The output keeps ``px_pitch`` so that power bookkeeping is unchanged;
    its columns are frequency bins of width ``1 / (grid_px * px_pitch)``.
    """
    a = np.fft.ifftshift(field.amplitude, axes=1)
    a = np.fft.fftshift(np.fft.fft(a, axis=1, norm="ortho"), axes=1)
    return Field(a, field.px_pitch)


def _kz_offset(f2: np.ndarray, wavelength: float) -> np.ndarray:
    # kz - 1/lambda without cancellation; NaN for evanescent components
    inv = 1 / wavelength
    with np.errstate(invalid="ignore"):
        kz = np.sqrt(inv**2 - f2)
    return -f2 / (inv + kz)


def _band_limit(n: int, px_pitch: float, distance: float, wavelength: float) -> float:
    # alias-free frequency limit of the sampled angular-spectrum transfer function
    df = 1 / (n * px_pitch)
    return 1 / (wavelength * math.sqrt((2 * df * distance) ** 2 + 1))


def _apply_transfer(spectrum, transfer, keep, max_loss):
    total = np.sum(np.abs(spectrum) ** 2)
    lost = np.sum(np.abs(spectrum[~keep]) ** 2)
    if total > 0 and lost / total > max_loss:
        raise SamplingError(
            f"grid sampling cannot represent this propagation: band limit removes "
            f"{lost / total:.3g} of the power (allowed {max_loss:g})"
        )
    return np.where(keep, spectrum * transfer, 0)


def propagate(field: Field, distance: float, wavelength: float, max_loss: float = 1e-6) -> Field:
    """Band-limited angular-spectrum propagation over ``distance`` [m].

    The common carrier phase exp(2 pi i z / lambda) is dropped. The grid is
    periodic, so the caller must leave room for the field to spread.

    Raises
    ------
    SamplingError
        If the alias-free band limit (or evanescent cutoff) would discard
        more than ``max_loss`` of the field power.
    """
    if distance < 0:
        raise ValueError("distance must be non-negative")
    if distance == 0:
        return field
    n, dx = field.grid_px, field.px_pitch
    f = np.fft.fftfreq(n, d=dx)
    fx, fy = np.meshgrid(f, f)
    f2 = fx**2 + fy**2
    limit = _band_limit(n, dx, distance, wavelength)
    keep = (np.abs(fx) <= limit) & (np.abs(fy) <= limit) & (f2 < 1 / wavelength**2)
    phase = np.nan_to_num(_kz_offset(f2, wavelength))
    transfer = np.exp(2j * np.pi * distance * phase)
    spectrum = np.fft.fft2(field.amplitude, norm="ortho")
    out = _apply_transfer(spectrum, transfer, keep, max_loss)
    return Field(np.fft.ifft2(out, norm="ortho"), dx)


def propagate_y(field: Field, distance: float, wavelength: float, max_loss: float = 1e-6) -> Field:
    """Angular-spectrum propagation along y only, each column independently.

    Models the direction a cylindrical lens leaves unfocused.
    """
    if distance < 0:
        raise ValueError("distance must be non-negative")
    if distance == 0:
        return field
    n, dy = field.grid_px, field.px_pitch
    fy = np.fft.fftfreq(n, d=dy)[:, None]
    f2 = fy**2
    limit = _band_limit(n, dy, distance, wavelength)
    keep = np.broadcast_to((np.abs(fy) <= limit) & (f2 < 1 / wavelength**2), (n, n))
    transfer = np.exp(2j * np.pi * distance * np.nan_to_num(_kz_offset(f2, wavelength)))
    spectrum = np.fft.fft(field.amplitude, axis=0, norm="ortho")
    out = _apply_transfer(spectrum, transfer, keep, max_loss)
    return Field(np.fft.ifft(out, axis=0, norm="ortho"), dy)


def extract_zero_order(field: Field, cfg: PipelineConfig) -> ReadoutResult:
    """Filter the central columns around zero frequency and integrate each row band."""
    layout = cfg.layout
    _check_layout(field, layout)
    c0 = field.grid_px // 2
    h = cfg.zero_order_halfwidth
    kept = field.intensity()[:, c0 - h : c0 + h + 1].sum(axis=1) * field.px_pitch**2
    rows = np.array([kept[layout.cell_slice(j)].sum() for j in range(layout.n)])
    total = rows.sum()
    if not total > 0:
        raise ValueError("no light reached the readout rows")
    return ReadoutResult(
        row_intensities=rows,
        probabilities=rows / total,
        zero_order_column=field.amplitude[:, c0].copy(),
    )


def project_rows(column: np.ndarray, layout: LatticeLayout) -> np.ndarray:
    """Complex overlap of a zero-order column with each row's y-profile.

    In ideal mode this is proportional to ``M u`` with a common real factor,
    which makes output phases comparable.
    """
    return np.array([np.dot(cell_profile(layout, j), column) for j in range(layout.n)])


def pipeline_planes(u, m, cfg: PipelineConfig) -> dict[str, Field]:
    """Field at every plane of the pipeline, in order.

    Keys: ``encoded`` (after the first modulator), ``modulated`` (after the
    second), ``transformed`` (lens focal plane along x) and ``detected``
    (camera, after the y spread).
    """
    layout = cfg.layout
    physical = cfg.mode == "physical"
    planes = {}
    fld = encode_vector(layout, u)
    planes["encoded"] = fld
    if physical:
        fld = propagate(fld, cfg.relay_distance, cfg.wavelength)
    fld = encode_matrix(fld, m, layout)
    if physical:
        fld = propagate(fld, cfg.relay_distance, cfg.wavelength)
    planes["modulated"] = fld
    fld = cylindrical_transform(fld)
    planes["transformed"] = fld
    if physical:
        fld = propagate_y(fld, cfg.propagation_distance, cfg.wavelength)
    planes["detected"] = fld
    return planes


def run_pipeline(u, m, cfg: PipelineConfig) -> ReadoutResult:
    """Encode ``u``, modulate with ``m``, transform, and read out the result rows."""
    u = as_state(u)
    m = as_gate(m)
    if m.shape[1] != u.size:
        raise DimensionError(f"matrix is {m.shape[0]}x{m.shape[1]} but vector has length {u.size}")
    return extract_zero_order(pipeline_planes(u, m, cfg)["detected"], cfg)


def mode_overlap(a: Field, b: Field) -> float:
    """Amplitude overlap sum |a||b| dA; 0 for disjoint fields, 1 for identical unit-power ones."""
    return float(np.sum(np.abs(a.amplitude) * np.abs(b.amplitude)) * a.px_pitch**2)


def gaussian_beam(grid_px: int, px_pitch: float, waist: float) -> Field:
    """Untruncated unit-power Gaussian centred on the grid."""
    x = (np.arange(grid_px) - (grid_px - 1) / 2) * px_pitch
    g = np.exp(-(x**2) / waist**2)
    a = np.outer(g, g)
    return Field(a / math.sqrt(np.sum(a**2) * px_pitch**2), px_pitch)


def beam_radius(field: Field, axis: int = 1) -> float:
    """1/e^2 intensity radius from the second moment of the marginal along ``axis``.

    ``axis=1`` measures along x, ``axis=0`` along y. For a Gaussian this is
    exactly its waist parameter.
    """
    marginal = field.intensity().sum(axis=1 - axis)
    x = (np.arange(field.grid_px) - (field.grid_px - 1) / 2) * field.px_pitch
    p = marginal / marginal.sum()
    mean = np.sum(p * x)
    return 2 * math.sqrt(np.sum(p * (x - mean) ** 2))


def rayleigh_range(waist: float, wavelength: float) -> float:
    return math.pi * waist**2 / wavelength


def gaussian_waist(waist: float, distance: float, wavelength: float) -> float:
    """Beam radius after ``distance`` of free space for a waist ``waist`` at z = 0."""
    return waist * math.sqrt(1 + (distance / rayleigh_range(waist, wavelength)) ** 2)
