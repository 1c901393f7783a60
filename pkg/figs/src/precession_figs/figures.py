"""Publication-style figures from simulator output files."""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import read_curve_csv, read_grid, read_overlay

AU_SCALE = 1e4  # axes of the snapshot panels are in 10^4 atomic units


@dataclass
class FigureSpec:
    """One rendering request: which figure, from which files, to where."""

    figure_id: int  # 1, 2 or 3
    inputs: list = field(default_factory=list)  # paths; fig3 pairs grids with overlays
    output: str = "figure.png"
    contour_level: float = 0.5  # fraction of the density peak (fig 3)
    surface: bool = False  # fig 3: render a 3D surface of the first grid instead

    def __post_init__(self):
        if self.figure_id not in (1, 2, 3):
            raise ValueError(f"unknown figure id {self.figure_id}")
        if not 0.0 < self.contour_level < 1.0:
            raise ValueError("contour level must be a fraction of the peak in (0, 1)")


def render_figure(spec: FigureSpec) -> str:
    """Render the requested figure and return the output path."""
    if spec.figure_id == 1:
        _fig1(spec)
    elif spec.figure_id == 2:
        _fig2(spec)
    elif spec.surface:
        _fig3_surface(spec)
    else:
        _fig3_contours(spec)
    return spec.output


def _save(fig, path):
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _fig1(spec: FigureSpec):
    data = read_curve_csv(spec.inputs[0], ("eta", "eps"))
    fig, ax = plt.subplots(figsize=(4.8, 3.2))
    ax.plot(data["eta"], data["eps"], "k-")
    ax.set_xlabel(r"$\eta$")
    ax.set_ylabel(r"$\epsilon$")
    ax.set_xlim(data["eta"].min(), data["eta"].max())
    ax.set_ylim(0.0, 1.05)
    fig.tight_layout()
    _save(fig, spec.output)


def _fig2(spec: FigureSpec):
    data = read_curve_csv(spec.inputs[0], ("eps", "abs_dphi_lower", "abs_dphi_upper"))
    fig, ax = plt.subplots(figsize=(4.8, 3.2))
    ax.plot(data["eps"], data["abs_dphi_lower"], "k-", label=r"$\eta < 1$")
    ax.plot(data["eps"], data["abs_dphi_upper"], "k--", label=r"$\eta > 1$")
    ax.set_xlabel(r"$\epsilon$")
    ax.set_ylabel(r"$|\delta\phi|$")
    ax.set_xlim(0.0, data["eps"].max())
    ax.legend(frameon=False)
    fig.tight_layout()
    _save(fig, spec.output)


def _pair_inputs(spec: FigureSpec):
    grids = [p for p in spec.inputs if ".grid" in str(p)]
    overlays = [p for p in spec.inputs if ".overlay" in str(p)]
    if not grids:
        # fall back: grids first, overlays second half
        half = len(spec.inputs) // 2
        grids, overlays = spec.inputs[:half], spec.inputs[half:]
    return grids, overlays


def _fig3_contours(spec: FigureSpec):
    grids, overlays = _pair_inputs(spec)
    fig, ax = plt.subplots(figsize=(4.2, 4.2))
    extent = None
    for path in grids:
        header, values = read_grid(path)
        extent = header["extent_au"]
        half = extent / 2.0 / AU_SCALE
        coords = np.linspace(-half, half, header["resolution"])
        level = spec.contour_level * values.max()
        ax.contour(coords, coords, values, levels=[level],
                   colors="k", linewidths=1.0)
    for path in overlays:
        pts = read_overlay(path) / AU_SCALE
        closed = np.vstack([pts, pts[:1]])
        ax.plot(closed[:, 0], closed[:, 1], "k--", linewidth=0.9)
    ax.plot([0.0], [0.0], "k+", markersize=9)
    if extent is not None:
        half = extent / 2.0 / AU_SCALE
        ax.set_xlim(-half, half)
        ax.set_ylim(-half, half)
    ax.set_aspect("equal")
    ax.set_xlabel(r"$x$ ($10^4$ a.u.)")
    ax.set_ylabel(r"$y$ ($10^4$ a.u.)")
    fig.tight_layout()
    _save(fig, spec.output)


def _fig3_surface(spec: FigureSpec):
    grids, _ = _pair_inputs(spec)
    header, values = read_grid(grids[0])
    half = header["extent_au"] / 2.0 / AU_SCALE
    coords = np.linspace(-half, half, header["resolution"])
    xs, ys = np.meshgrid(coords, coords)
    fig = plt.figure(figsize=(4.8, 3.8))
    ax = fig.add_subplot(projection="3d")
    stride = max(1, header["resolution"] // 96)
    ax.plot_surface(xs[::stride, ::stride], ys[::stride, ::stride],
                    values[::stride, ::stride] / values.max(),
                    rstride=1, cstride=1, cmap="viridis", linewidth=0.0)
    ax.set_xlabel(r"$x$ ($10^4$ a.u.)")
    ax.set_ylabel(r"$y$ ($10^4$ a.u.)")
    ax.set_zlabel("relative density")
    _save(fig, spec.output)
