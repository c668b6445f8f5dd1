"""Result suites: Hadamard crosstalk benches, Deutsch-Jozsa runs, scaling sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from latticeqc.errors import DimensionError, FunctionClassError
from latticeqc.gates import (
    BooleanFunction,
    dj_expected_output,
    dj_matrix,
    hadamard_basis_state,
    hadamard_matrix,
    qubits_for,
)
from latticeqc.lattice import LatticeLayout, gaussian_cell_mode
from latticeqc.optics import (
    DEFAULT_EXTENT,
    PipelineConfig,
    ReadoutResult,
    gaussian_waist,
    mode_overlap,
    propagate_y,
    run_pipeline,
)

DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True, eq=False)
class CrosstalkMatrix:
    """Row-normalized readout per input basis state.

    ``fidelity`` is the mean of the diagonal and ``fidelity_std`` its
    standard deviation. In simulation the spread is purely systematic.
    """

    entries: np.ndarray
    fidelity: float
    fidelity_std: float

    @classmethod
    def from_rows(cls, rows) -> "CrosstalkMatrix":
        entries = np.asarray(rows, dtype=float)
        entries = entries / entries.sum(axis=1, keepdims=True)
        diag = np.diag(entries)
        return cls(entries, float(diag.mean()), float(diag.std()))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def summary(self) -> dict:
        return {"N": self.n, "fidelity": self.fidelity, "fidelity_std": self.fidelity_std}


@dataclass(frozen=True, eq=False)
class DjVerdict:
    function_label: str
    measured_probabilities: np.ndarray
    verdict: str
    correct: bool
    zero_row_probability: float
    fidelity: float

    def to_dict(self) -> dict:
        return {
            "function_label": self.function_label,
            "verdict": self.verdict,
            "correct": self.correct,
            "zero_row_probability": self.zero_row_probability,
            "fidelity": self.fidelity,
            "measured_probabilities": [float(p) for p in self.measured_probabilities],
        }


def _require_n(cfg: PipelineConfig, n: int) -> None:
    if cfg.layout.n != n:
        raise DimensionError(f"config lattice has n={cfg.layout.n}, expected N={n}")


def crosstalk_bench(n_qubits: int, cfg: PipelineConfig, readouts: list | None = None) -> CrosstalkMatrix:
    """Send every Hadamard basis state through an H_N-modulated pipeline.

    Row ``j`` of the result is the readout for input |u_j>; ideally e_j.
    If ``readouts`` is a list, the raw :class:`ReadoutResult` of each row is
    appended to it.
    """
    n = 2**n_qubits
    _require_n(cfg, n)
    h = hadamard_matrix(n_qubits)
    rows = []
    for j in range(n):
        result = run_pipeline(hadamard_basis_state(n_qubits, j), h, cfg)
        rows.append(result.probabilities)
        if readouts is not None:
            readouts.append(result)
    return CrosstalkMatrix.from_rows(rows)


def classical_fidelity(p, q) -> float:
    """(sum_j sqrt(p_j q_j))^2 between two probability vectors."""
    return float(np.sum(np.sqrt(np.clip(p, 0, None) * np.clip(q, 0, None))) ** 2)


def dj_run(
    f: BooleanFunction,
    cfg: PipelineConfig,
    threshold: float = DEFAULT_THRESHOLD,
) -> DjVerdict:
    """Run Deutsch-Jozsa: |u_0> on the first plane, H_N U_F on the second.

    The function is called constant when the readout probability on row 0
    exceeds ``threshold``. ``fidelity`` compares the measured distribution
    with the exact output of :func:`dj_expected_output`.
    """
    label = f.kind
    if label == "neither":
        raise FunctionClassError(f"function {f.bits()} is neither constant nor balanced")
    n_qubits = qubits_for(f.n)
    _require_n(cfg, f.n)
    result = run_pipeline(hadamard_basis_state(n_qubits, 0), dj_matrix(f), cfg)
    p = result.probabilities
    zero = float(p[0])
    verdict = "constant" if zero > threshold else "balanced"
    expected = np.abs(dj_expected_output(f, n_qubits)) ** 2
    return DjVerdict(
        function_label=label,
        measured_probabilities=p,
        verdict=verdict,
        correct=verdict == label,
        zero_row_probability=zero,
        fidelity=classical_fidelity(p, expected),
    )


def adjacent_overlap(layout: LatticeLayout, distance: float, wavelength: float) -> float:
    """Amplitude overlap of two vertically adjacent cell modes after a y spread."""
    a = gaussian_cell_mode(layout, 0, 0)
    b = gaussian_cell_mode(layout, 1, 0)
    if distance > 0:
        a = propagate_y(a, distance, wavelength)
        b = propagate_y(b, distance, wavelength)
    return mode_overlap(a, b)


@dataclass(frozen=True)
class ScalingRow:
    n: int
    fidelity: float
    fidelity_std: float
    cell_pitch: float
    waist: float
    spread_waist: float
    overlap: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def scaling_study(
    dimensions,
    cfg: PipelineConfig,
    extent: float = DEFAULT_EXTENT,
) -> list[ScalingRow]:
    """Crosstalk fidelity versus N at a fixed lattice extent.

    For each N the cell pitch is ``extent / N`` and the waist a quarter of
    it; sampling density (pixels per cell) and guard-band ratio follow the
    template ``cfg``. ``spread_waist`` is the free-space beam radius after
    the lens distance; ``overlap`` is the amplitude overlap of adjacent rows
    at the camera (0 in ideal mode, where nothing spreads).
    """
    template = cfg.layout
    pad = template.grid_px // (template.n * template.px_per_cell)
    physical = cfg.mode == "physical"
    out = []
    for n in dimensions:
        n_qubits = qubits_for(n)
        pitch = extent / n
        layout = LatticeLayout.create(n, pitch, pitch / 4, template.px_per_cell, pad)
        run_cfg = replace(cfg, layout=layout)
        cm = crosstalk_bench(n_qubits, run_cfg)
        z = cfg.propagation_distance if physical else 0.0
        out.append(
            ScalingRow(
                n=n,
                fidelity=cm.fidelity,
                fidelity_std=cm.fidelity_std,
                cell_pitch=pitch,
                waist=layout.waist,
                spread_waist=gaussian_waist(layout.waist, z, cfg.wavelength),
                overlap=adjacent_overlap(layout, z, cfg.wavelength),
            )
        )
    return out


def is_non_increasing(values, tol: float = 0.0) -> bool:
    return all(b <= a + tol for a, b in zip(values, values[1:]))


def dj_sweep(functions, cfg: PipelineConfig, threshold: float = DEFAULT_THRESHOLD) -> list[DjVerdict]:
    return [dj_run(f, cfg, threshold) for f in functions]
