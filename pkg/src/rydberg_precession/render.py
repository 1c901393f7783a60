"""Orbital-plane density grids, principal axes and classical overlays.

The density is the equatorial slice |psi(x, y, 0)|^2 assembled from
radial functions and equatorial spherical harmonics.  Grids are centered
on the force center with half-integer pixel coordinates, so radii repeat
exactly and the radial functions are evaluated once per unique ring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coherent import CoupledState
from .errors import DomainError, OrientationError
from .hydrogenic import ShellSpec, equatorial_ylm_matrix, mean_radius, radial_wavefunction

__all__ = [
    "DensityGrid",
    "EllipseOverlay",
    "density_grid",
    "principal_axis",
    "classical_overlay",
    "write_grid",
    "read_grid",
    "write_overlay",
]

AMP_CUTOFF = 1e-10  # relative amplitude below which (l, m) terms are skipped


@dataclass
class DensityGrid:
    """Relative probability density on a centered square grid (a.u.)."""

    extent: float  # full width in atomic length units
    resolution: int
    values: np.ndarray  # resolution x resolution, row i <-> y_i, col j <-> x_j
    time: float  # seconds

    def axis_coords(self) -> np.ndarray:
        half = (self.resolution - 1) / 2.0
        return (np.arange(self.resolution) - half) * (self.extent / (self.resolution - 1))


@dataclass
class EllipseOverlay:
    """Sampled Kepler ellipse with the focus at the origin."""

    semi_major: float  # a.u.
    eccentricity: float
    rotation: float  # radians
    points: np.ndarray  # (n_points, 2) of (x, y) in a.u.


def density_grid(state: CoupledState, extent: float, resolution: int,
                 time: float = 0.0) -> DensityGrid:
    """|psi(x, y, 0)|^2 over a centered square of the given full width.

    psi = sum over (l, m) of amp * R_nl(r) * Y_lm(pi/2, phi); terms with
    |amp| below 1e-10 of the maximum are skipped.  The radial factor is
    tabulated on the exact set of distinct pixel radii.
    """
    if resolution < 16:
        raise DomainError("resolution must be >= 16")
    if extent <= 0.0:
        raise DomainError("extent must be positive")
    shell = state.shell
    n = shell.n

    amps = state.amps
    cut = AMP_CUTOFF * np.abs(amps).max()
    l_idx, c_idx = np.nonzero(np.abs(amps) >= cut)
    m_idx = c_idx - (n - 1)

    # Half-integer pixel coordinates: x = step * k / 2 with odd/even k,
    # so r^2 is step^2/4 * (k_i^2 + k_j^2) and rings repeat exactly.
    kk = 2 * np.arange(resolution) - (resolution - 1)
    step = extent / (resolution - 1)
    q = kk[:, None] ** 2 + kk[None, :] ** 2  # integers
    q_unique, inverse = np.unique(q, return_inverse=True)
    r_unique = 0.5 * step * np.sqrt(q_unique.astype(float))

    ylm = equatorial_ylm_matrix(n - 1)

    # Radial tables per distinct l, combined into per-m angular groups:
    # psi(pixel) = sum_m e^{i m phi} g_m(r).
    g_by_m: dict[int, np.ndarray] = {}
    radial_cache: dict[int, np.ndarray] = {}
    for l, m, col in zip(l_idx, m_idx, c_idx):
        lam = ylm[l, m + (n - 1)]
        if lam == 0.0:
            continue
        if l not in radial_cache:
            radial_cache[int(l)] = radial_wavefunction(shell, int(l), r_unique)
        term = amps[l, col] * lam * radial_cache[int(l)]
        if int(m) in g_by_m:
            g_by_m[int(m)] += term
        else:
            g_by_m[int(m)] = term.astype(complex)

    x = 0.5 * step * kk
    phi = np.arctan2(x[:, None], x[None, :])  # row index is y
    psi = np.zeros((resolution, resolution), dtype=complex)
    inv = inverse.reshape(resolution, resolution)
    for m, g in g_by_m.items():
        psi += g[inv] * np.exp(1j * m * phi)
    values = np.abs(psi) ** 2
    return DensityGrid(extent=extent, resolution=resolution, values=values, time=time)


def principal_axis(grid: DensityGrid) -> float:
    """Orientation (mod pi) of the density-weighted second-moment tensor.

    Raises OrientationError when the grid is too isotropic for the
    dominant eigenvector to mean anything (axis ratio below 1.01).
    """
    c = grid.axis_coords()
    w = grid.values
    total = float(w.sum())
    if total <= 0.0:
        raise OrientationError("empty density grid")
    xx = float(np.einsum("ij,j->", w, c**2)) / total
    yy = float(np.einsum("ij,i->", w, c**2)) / total
    xy = float(np.einsum("ij,i,j->", w, c, c)) / total

    half_diff = 0.5 * (xx - yy)
    root = math.hypot(half_diff, xy)
    mean = 0.5 * (xx + yy)
    lam_max, lam_min = mean + root, mean - root
    if lam_min <= 0.0 or lam_max / lam_min <= 1.01:
        raise OrientationError("density too isotropic: principal axis undefined")
    angle = 0.5 * math.atan2(2.0 * xy, xx - yy)
    return angle % math.pi


def classical_overlay(shell: ShellSpec, eps: float, theta: float,
                      n_points: int = 720) -> EllipseOverlay:
    """Kepler ellipse r = a(1-eps^2)/(1+eps cos(phi-theta)) with a = n^2/Z."""
    if not 0.0 <= eps < 1.0:
        raise DomainError("eccentricity must be in [0, 1)")
    if n_points < 3:
        raise DomainError("need at least 3 boundary points")
    a = mean_radius(shell)
    phi = np.linspace(0.0, 2.0 * math.pi, n_points, endpoint=False)
    r = a * (1.0 - eps**2) / (1.0 + eps * np.cos(phi - theta))
    pts = np.column_stack([r * np.cos(phi), r * np.sin(phi)])
    return EllipseOverlay(semi_major=a, eccentricity=eps, rotation=theta, points=pts)


# ---------------------------------------------------------------------------
# File formats (consumed verbatim by the plotting component)
# ---------------------------------------------------------------------------

def write_grid(path, grid: DensityGrid, shell: ShellSpec, eta: float | None) -> None:
    """Grid file: six `key,value` header lines, then resolution CSV rows."""
    with open(path, "w") as fh:
        fh.write(f"extent_au,{grid.extent!r}\n")
        fh.write(f"resolution,{grid.resolution}\n")
        fh.write(f"time_s,{grid.time!r}\n")
        fh.write(f"n,{shell.n}\n")
        fh.write(f"Z,{shell.Z}\n")
        fh.write(f"eta,{'nan' if eta is None else repr(eta)}\n")
        for row in grid.values:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def read_grid(path) -> tuple[DensityGrid, dict]:
    """Parse a grid file back; returns (grid, header_dict)."""
    with open(path) as fh:
        header = {}
        for _ in range(6):
            key, value = fh.readline().strip().split(",", 1)
            header[key] = value
        resolution = int(header["resolution"])
        values = np.loadtxt(fh, delimiter=",", max_rows=resolution)
    grid = DensityGrid(
        extent=float(header["extent_au"]),
        resolution=resolution,
        values=np.atleast_2d(values),
        time=float(header["time_s"]),
    )
    return grid, header


def write_overlay(path, overlay: EllipseOverlay) -> None:
    """Overlay file: CSV of boundary points (x_au, y_au)."""
    with open(path, "w") as fh:
        fh.write("x_au,y_au\n")
        for x, y in overlay.points:
            fh.write(f"{float(x)!r},{float(y)!r}\n")
