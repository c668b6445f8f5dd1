"""Report figures rendered straight to PNG files.

Uses ``matplotlib.figure.Figure`` with the Agg canvas, so nothing touches
pyplot's global state and no display is needed.
"""

from __future__ import annotations

import io

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from latticeqc.fileio import atomic_write

RC = {
    "font.size": 10,
    "axes.titlesize": 10,
    "axes.labelsize": 10,
}
PNG_METADATA = {"Software": None}


def _figure(width=4.5, height=3.5) -> Figure:
    fig = Figure(figsize=(width, height), dpi=120)
    FigureCanvasAgg(fig)
    return fig


def _save(fig: Figure, path):
    buf = io.BytesIO()
    fig.savefig(buf, format="png", metadata=PNG_METADATA, bbox_inches="tight")
    return atomic_write(path, buf.getvalue())


def _style(ax):
    for side in ("top", "right"):
        ax.spines[side].set_visible(False)
    ax.tick_params(labelsize=RC["font.size"] - 1)


def plot_crosstalk(cm, path, title: str | None = None):
    """Crosstalk matrix as an image with the fidelity in the title."""
    fig = _figure()
    ax = fig.add_subplot()
    n = cm.n
    im = ax.imshow(cm.entries, cmap="viridis", vmin=0, vmax=1)
    ax.set_xlabel("measured row $|v_j\\rangle$")
    ax.set_ylabel("input $|u_j\\rangle$")
    if n <= 16:
        ax.set_xticks(range(n))
        ax.set_yticks(range(n))
    label = title or f"N = {n}"
    ax.set_title(f"{label}: F = {cm.fidelity:.3f} $\\pm$ {cm.fidelity_std:.3f}")
    fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04)
    return _save(fig, path)


def plot_dj_bars(verdict, expected, path):
    """Normalized row intensity against row position, with the exact output overlaid."""
    fig = _figure(width=4.5, height=3.0)
    ax = fig.add_subplot()
    p = np.asarray(verdict.measured_probabilities)
    rows = np.arange(p.size)
    ax.bar(rows, p, color="0.35", label="simulated")
    ax.plot(rows, expected, "o", mfc="none", mec="C3", label="exact")
    ax.set_xticks(rows)
    ax.set_ylim(0, 1.05)
    ax.set_xlabel("row position")
    ax.set_ylabel("normalized intensity")
    ax.set_title(f"{verdict.function_label} function, verdict: {verdict.verdict}")
    ax.legend(frameon=False, fontsize=8)
    _style(ax)
    return _save(fig, path)


def plot_scaling(rows, path):
    """Fidelity and adjacent-row overlap versus dimension."""
    fig = _figure(width=5.0, height=3.5)
    ax = fig.add_subplot()
    n = [r.n for r in rows]
    ax.errorbar(n, [r.fidelity for r in rows], yerr=[r.fidelity_std for r in rows], marker="o", capsize=3, color="k")
    ax.set_xscale("log", base=2)
    ax.set_xticks(n)
    ax.set_xticklabels([str(v) for v in n])
    ax.set_xlabel("dimension N")
    ax.set_ylabel("fidelity")
    _style(ax)
    ax2 = ax.twinx()
    ax2.plot(n, [r.overlap for r in rows], "s--", color="C0")
    ax2.set_ylabel("adjacent-row overlap", color="C0")
    ax2.spines["top"].set_visible(False)
    return _save(fig, path)


def save_intensity_png(intensity, path) -> float:
    """Max-normalized grayscale PNG; returns the scale factor."""
    img = np.asarray(intensity, dtype=float)
    scale = float(img.max())
    norm = img / scale if scale > 0 else img
    fig = Figure(figsize=(img.shape[1] / 100, img.shape[0] / 100), dpi=100)
    FigureCanvasAgg(fig)
    fig.figimage(norm, cmap="gray", vmin=0, vmax=1, origin="upper")
    buf = io.BytesIO()
    fig.savefig(buf, format="png", metadata=PNG_METADATA, dpi=100)
    atomic_write(path, buf.getvalue())
    return scale
