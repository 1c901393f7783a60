import math

import numpy as np
import pytest
import scipy.integrate
import scipy.special

from rydberg_precession.coherent import (
    CoherentParams,
    build_product_state,
    eccentricity_of_eta,
    to_coupled,
)
from rydberg_precession.dynamics import EvolutionSpec, TimeSpec, evolve, rotate_about_z
from rydberg_precession.errors import DomainError, OrientationError
from rydberg_precession.hydrogenic import DEFAULT_CONSTANTS, ShellSpec
from rydberg_precession.render import (
    DensityGrid,
    classical_overlay,
    density_grid,
    principal_axis,
    read_grid,
    write_grid,
    write_overlay,
)


def coupled_state(n, eta):
    return to_coupled(build_product_state(CoherentParams.planar(ShellSpec(n, 1), eta)))


class TestDensityGrid:
    def test_parameter_validation(self):
        psi = coupled_state(5, 0.3)
        with pytest.raises(DomainError):
            density_grid(psi, extent=100.0, resolution=8)
        with pytest.raises(DomainError):
            density_grid(psi, extent=-1.0, resolution=32)

    def test_circular_state_is_rotationally_symmetric(self):
        psi = coupled_state(21, 0.0)
        grid = density_grid(psi, extent=4.0 * 441.0, resolution=64)
        # pixels sharing an exact radius ring must share a value
        kk = 2 * np.arange(64) - 63
        q = (kk[:, None] ** 2 + kk[None, :] ** 2).ravel()
        values = grid.values.ravel()
        for ring in np.unique(q)[200:220]:
            ring_vals = values[q == ring]
            if ring_vals.max() > 1e-12 * values.max():
                spread = np.ptp(ring_vals) / ring_vals.max()
                assert spread < 1e-8

    def test_reflection_symmetry_at_t0(self):
        grid = density_grid(coupled_state(21, 0.3), extent=4.0 * 441.0, resolution=64)
        asym = np.abs(grid.values - grid.values[::-1, :]).max() / grid.values.max()
        assert asym < 1e-8

    def test_against_independent_scipy_evaluation(self):
        # evolved state, so radial, angular and phase conventions all matter
        shell = ShellSpec(9, 1)
        psi = coupled_state(9, 0.4)
        spec = EvolutionSpec(shell=shell, time=TimeSpec(0.0, "s"))
        psi_t = evolve(psi, spec, t_seconds=2e-11)
        grid = density_grid(psi_t, extent=4.0 * 81.0, resolution=48)

        half = 47 / 2.0
        coords = (np.arange(48) - half) * (4.0 * 81.0 / 47.0)
        X, Y = np.meshgrid(coords, coords)
        R, PHI = np.hypot(X, Y), np.arctan2(Y, X)
        psi_ref = np.zeros_like(R, dtype=complex)
        n = 9
        for l in range(n):
            rho = 2.0 * R / n
            norm = math.exp(0.5 * (math.log(8.0 / n**3) + math.lgamma(n - l)
                                   - math.log(2.0 * n) - math.lgamma(n + l + 1)))
            rad = norm * np.exp(-rho / 2.0) * rho**l * scipy.special.genlaguerre(
                n - l - 1, 2 * l + 1)(rho)
            for col in range(2 * n - 1):
                amp = psi_t.amps[l, col]
                m = col - (n - 1)
                if amp == 0.0 or abs(m) > l:
                    continue
                psi_ref += amp * rad * scipy.special.sph_harm_y(l, m, math.pi / 2.0, PHI)
        ref = np.abs(psi_ref) ** 2
        assert np.abs(grid.values - ref).max() < 1e-8 * ref.max()

    def test_rotation_linearity_quarter_turn(self):
        # rotating the state by pi/2 maps the grid onto itself exactly
        psi = coupled_state(21, 0.3)
        base = density_grid(psi, extent=4.0 * 441.0, resolution=64).values
        rotated = density_grid(rotate_about_z(psi, math.pi / 2.0),
                               extent=4.0 * 441.0, resolution=64).values
        assert np.abs(rotated - np.rot90(base, k=-1)).max() < 1e-8 * base.max()

    def test_field_of_view_bridge(self):
        microns = 8.0e4 * DEFAULT_CONSTANTS.bohr_radius_si * 1e6
        assert abs(microns - 4.23) / 4.23 < 0.005


class TestPrincipalAxis:
    def synthetic_ellipse(self, angle, resolution=128):
        half = (resolution - 1) / 2.0
        c = (np.arange(resolution) - half) / half
        X, Y = np.meshgrid(c, c)
        xr = np.cos(angle) * X + np.sin(angle) * Y
        yr = -np.sin(angle) * X + np.cos(angle) * Y
        values = np.exp(-((xr / 0.3) ** 2 + (yr / 0.1) ** 2))
        return DensityGrid(extent=2.0, resolution=resolution, values=values, time=0.0)

    def test_recovers_synthetic_rotation(self):
        for angle in (0.4, 1.2, 2.9):
            got = principal_axis(self.synthetic_ellipse(angle))
            diff = (got - angle) % math.pi
            assert min(diff, math.pi - diff) < 1e-3

    def test_canonical_state_axis_is_x(self):
        grid = density_grid(coupled_state(21, 0.3), extent=4.0 * 441.0, resolution=64)
        axis = principal_axis(grid)
        assert min(axis, math.pi - axis) < 0.02

    def test_isotropic_grid_rejected(self):
        grid = density_grid(coupled_state(21, 0.0), extent=4.0 * 441.0, resolution=64)
        with pytest.raises(OrientationError):
            principal_axis(grid)


class TestClassicalOverlay:
    def test_circle_limit(self):
        overlay = classical_overlay(ShellSpec(21, 1), 0.0, 0.0, n_points=64)
        radii = np.hypot(overlay.points[:, 0], overlay.points[:, 1])
        assert np.allclose(radii, 441.0, rtol=1e-12)

    def test_conic_equation_residual(self):
        shell = ShellSpec(141, 1)
        overlay = classical_overlay(shell, 0.385, 0.7, n_points=360)
        a, eps, th = overlay.semi_major, overlay.eccentricity, overlay.rotation
        x, y = overlay.points[:, 0], overlay.points[:, 1]
        r = np.hypot(x, y)
        phi = np.arctan2(y, x)
        residual = r - a * (1 - eps**2) / (1 + eps * np.cos(phi - th))
        assert np.abs(residual / a).max() < 1e-10

    def test_rotation_by_pi_swaps_perihelion(self):
        shell = ShellSpec(21, 1)
        eps = 0.5
        at0 = classical_overlay(shell, eps, 0.0, n_points=8)
        atpi = classical_overlay(shell, eps, math.pi, n_points=8)
        a = at0.semi_major
        # boundary point at phi = 0 moves from r = a(1-eps) to a(1+eps)
        assert math.isclose(at0.points[0, 0], a * (1 - eps), rel_tol=1e-12)
        assert math.isclose(atpi.points[0, 0], a * (1 + eps), rel_tol=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            classical_overlay(ShellSpec(5, 1), 1.0, 0.0)
        with pytest.raises(DomainError):
            classical_overlay(ShellSpec(5, 1), 0.5, 0.0, n_points=2)


class TestPlancherel:
    def test_small_shell_3d_norm(self):
        # integrate |psi|^2 over R^3 on a spherical product grid; validates
        # that the assembled basis functions are the orthonormal ones.
        from rydberg_precession.hydrogenic import radial_wavefunction, sph_harm
        shell = ShellSpec(5, 1)
        psi = coupled_state(5, 0.3)
        n = 5
        nodes, weights = np.polynomial.legendre.leggauss(24)
        thetas = np.arccos(nodes)
        phis = np.linspace(0.0, 2.0 * math.pi, 32, endpoint=False)

        terms = [(l, col, psi.amps[l, col]) for l in range(n) for col in range(2 * n - 1)
                 if psi.amps[l, col] != 0.0 and abs(col - (n - 1)) <= l]
        angular = np.array([
            [[sph_harm(l, col - (n - 1), theta, phi) for phi in phis] for theta in thetas]
            for l, col, _ in terms
        ])
        amps = np.array([a for _, _, a in terms])

        def radial_density(r):
            rad = np.array([radial_wavefunction(shell, l, r) for l, _, _ in terms])
            val = np.einsum("t,tij->ij", amps * rad, angular)
            shell_sum = float(np.einsum("i,ij->", weights, np.abs(val) ** 2))
            return shell_sum * (2.0 * math.pi / len(phis)) * r * r

        total, _ = scipy.integrate.quad(radial_density, 0.0, 120.0, limit=60)
        assert abs(total - 1.0) < 1e-3


class TestGridFiles:
    def test_write_read_round_trip(self, tmp_path):
        shell = ShellSpec(21, 1)
        grid = density_grid(coupled_state(21, 0.3), extent=1800.0, resolution=32,
                            time=1.5e-9)
        path = tmp_path / "grid.csv"
        write_grid(path, grid, shell, 0.3)
        back, header = read_grid(path)
        assert header == {"extent_au": "1800.0", "resolution": "32",
                          "time_s": "1.5e-09", "n": "21", "Z": "1", "eta": "0.3"}
        assert back.extent == 1800.0
        assert back.resolution == 32
        assert back.time == 1.5e-9
        assert np.array_equal(back.values, grid.values)

    def test_deterministic_bytes(self, tmp_path):
        shell = ShellSpec(5, 1)
        grid = density_grid(coupled_state(5, 0.2), extent=100.0, resolution=16)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_grid(p1, grid, shell, 0.2)
        write_grid(p2, grid, shell, 0.2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_overlay_format(self, tmp_path):
        overlay = classical_overlay(ShellSpec(5, 1), 0.3, 0.1, n_points=5)
        path = tmp_path / "overlay.csv"
        write_overlay(path, overlay)
        lines = path.read_text().splitlines()
        assert lines[0] == "x_au,y_au"
        assert len(lines) == 6
        x, y = map(float, lines[1].split(","))
        assert math.isclose(x, overlay.points[0, 0], rel_tol=1e-15)
