import math

import mpmath
import numpy as np
import pytest

from rydberg_precession.coherent import (
    CoherentParams,
    build_product_state,
    effective_l,
    observables,
    to_coupled,
)
from rydberg_precession.dynamics import (
    EvolutionSpec,
    TimeSpec,
    evolve,
    overlap,
    phase_mod_two_pi,
    precession_angle,
    rotate_about_z,
    state_observables,
    trace_precession,
)
from rydberg_precession.errors import ContractError, DomainError, OrientationError
from rydberg_precession.exact import dense_evolution_oracle
from rydberg_precession.hydrogenic import (
    DEFAULT_CONSTANTS,
    PhysicalConstants,
    ShellSpec,
    t_precession,
)


def coupled_state(n, eta, truncation=1e-12):
    return to_coupled(build_product_state(CoherentParams.planar(ShellSpec(n, 1), eta),
                                          truncation))


def zero_spec(n):
    return EvolutionSpec(shell=ShellSpec(n, 1), time=TimeSpec(0.0, "s"))


class TestTimeSpec:
    def test_parse_literals(self):
        assert TimeSpec.parse("0.25Tp") == TimeSpec(0.25, "Tp")
        assert TimeSpec.parse("3Tcl") == TimeSpec(3.0, "Tcl")
        assert TimeSpec.parse("1e-10s") == TimeSpec(1e-10, "s")

    def test_parse_errors(self):
        with pytest.raises(DomainError):
            TimeSpec.parse("12")
        with pytest.raises(DomainError):
            TimeSpec.parse("5Tx")
        with pytest.raises(DomainError):
            TimeSpec(-1.0, "s")

    def test_unit_resolution(self):
        ts = TimeSpec(0.5, "Tcl")
        assert ts.seconds(2.0, 100.0) == 1.0
        assert TimeSpec(0.25, "Tp").seconds(2.0, 100.0) == 25.0
        assert TimeSpec(7.0, "s").seconds(2.0, 100.0) == 7.0


class TestPhaseReduction:
    @pytest.mark.parametrize("omega,t", [
        (2.27e-14, 2.76e15),        # relative phase at ~T_p/4 scale
        (-1.895e-11, 1.104e16),     # low-l phase at full T_p, ~2e5 rad
        (-2.515e-5, 1.104e16),      # unreduced shell phase, ~2.8e11 rad
        (0.1, 3.0),
        (0.0, 5.0),
    ])
    def test_against_high_precision_oracle(self, omega, t):
        got = phase_mod_two_pi(omega, t)
        with mpmath.workdps(60):
            exact = mpmath.fmod(mpmath.mpf(omega) * mpmath.mpf(t), 2 * mpmath.pi)
            diff = min(abs(mpmath.mpf(got) - exact),
                       abs(mpmath.mpf(got) - exact + 2 * mpmath.pi),
                       abs(mpmath.mpf(got) - exact - 2 * mpmath.pi))
        assert float(diff) < 1e-9
        assert abs(got) <= math.pi * (1.0 + 1e-12)


class TestEvolve:
    def test_time_zero_is_identity(self):
        psi = coupled_state(21, 0.2)
        out = evolve(psi, zero_spec(21), t_seconds=0.0)
        assert np.array_equal(out.amps, psi.amps)

    def test_circular_state_observables_invariant(self):
        psi = coupled_state(21, 0.0)
        tp = t_precession(ShellSpec(21, 1), 20.0)
        out = evolve(psi, zero_spec(21), t_seconds=0.37 * tp)
        # single (l, m) component: only a phase can change
        assert np.abs(np.abs(out.amps) - np.abs(psi.amps)).max() < 1e-15

    def test_norm_preserved(self):
        psi = coupled_state(141, 0.4)
        tp = t_precession(ShellSpec(141, 1), 101.4)
        for frac in (0.01, 0.5, 1.0, 3.7):
            out = evolve(psi, zero_spec(141), t_seconds=frac * tp)
            assert abs(out.norm_squared() - 1.0) < 1e-12

    def test_l3_and_variance_exactly_conserved(self):
        psi = coupled_state(141, 0.2)
        rep0 = state_observables(psi)
        tp = t_precession(ShellSpec(141, 1), 129.23)
        rep = state_observables(evolve(psi, zero_spec(141), t_seconds=tp / 3.0))
        assert abs(rep.L_vec[2] - rep0.L_vec[2]) < 1e-12 * abs(rep0.L_vec[2])
        assert abs(rep.l_var - rep0.l_var) < 1e-9

    def test_h0_alone_conserves_all_observables(self):
        # alpha -> 0 switches the perturbation off; only the global E0
        # phase remains and every observable must stay put.
        frozen = PhysicalConstants(alpha=0.0)
        psi = coupled_state(21, 0.3)
        rep0 = state_observables(psi)
        spec = EvolutionSpec(shell=ShellSpec(21, 1), time=TimeSpec(0.0, "s"),
                             drop_global_phase=False)
        out = evolve(psi, spec, constants=frozen, t_seconds=1e-8)
        rep = state_observables(out)
        assert np.abs(rep.L_vec - rep0.L_vec).max() < 1e-10
        assert np.abs(rep.A_vec - rep0.A_vec).max() < 1e-10

    def test_global_phase_flag_changes_only_phase(self):
        psi = coupled_state(5, 0.3)
        spec_keep = EvolutionSpec(shell=ShellSpec(5, 1), time=TimeSpec(0.0, "s"),
                                  drop_global_phase=False)
        t = 1e-12
        kept = evolve(psi, spec_keep, t_seconds=t)
        dropped = evolve(psi, zero_spec(5), t_seconds=t)
        ratio = kept.amps[np.abs(kept.amps) > 1e-8] / dropped.amps[np.abs(dropped.amps) > 1e-8]
        assert np.abs(np.abs(ratio) - 1.0).max() < 1e-12
        assert np.abs(ratio - ratio[0]).max() < 1e-10

    def test_shell_mismatch(self):
        psi = coupled_state(5, 0.3)
        with pytest.raises(ContractError):
            evolve(psi, zero_spec(6), t_seconds=0.0)

    def test_requires_resolved_seconds(self):
        psi = coupled_state(5, 0.3)
        spec = EvolutionSpec(shell=ShellSpec(5, 1), time=TimeSpec(0.25, "Tp"))
        with pytest.raises(DomainError):
            evolve(psi, spec)


class TestRotation:
    def test_identity_angles(self):
        psi = coupled_state(21, 0.3)
        assert np.abs(rotate_about_z(psi, 0.0).amps - psi.amps).max() == 0.0
        assert np.abs(rotate_about_z(psi, 2.0 * math.pi).amps - psi.amps).max() < 1e-12

    def test_vector_transformation_of_a(self):
        psi = coupled_state(21, 0.3)
        rep0 = state_observables(psi)
        theta = 0.7
        rep = state_observables(rotate_about_z(psi, theta))
        rot = np.array([
            [math.cos(theta), -math.sin(theta), 0.0],
            [math.sin(theta), math.cos(theta), 0.0],
            [0.0, 0.0, 1.0],
        ])
        assert np.abs(rep.A_vec - rot @ rep0.A_vec).max() < 1e-10
        assert np.abs(rep.L_vec - rot @ rep0.L_vec).max() < 1e-10

    def test_precession_angle_reads_rotation(self):
        psi = coupled_state(21, 0.3)
        assert abs(precession_angle(rotate_about_z(psi, 0.3)) - 0.3) < 1e-8


class TestPrecessionAngle:
    def test_fresh_state_points_along_x(self):
        assert abs(precession_angle(coupled_state(141, 0.2))) < 1e-10

    def test_circular_state_is_undefined(self):
        with pytest.raises(OrientationError):
            precession_angle(coupled_state(21, 0.0))


class TestTrace:
    def test_basic_contract(self):
        params = CoherentParams.planar(ShellSpec(21, 1), 0.2)
        rep = observables(build_product_state(params))
        tp = t_precession(ShellSpec(21, 1), effective_l(rep))
        trace = trace_precession(params, tp / 4.0, 12)
        assert trace.thetas[0] == 0.0
        assert abs(trace.fidelities[0] - 1.0) < 1e-10
        assert trace.relative_error < 0.05
        # monotone |theta| and a sensible quarter-turn endpoint
        assert abs(abs(trace.thetas[-1]) - math.pi / 2.0) < 0.05

    def test_sample_count_guard(self):
        params = CoherentParams.planar(ShellSpec(21, 1), 0.2)
        with pytest.raises(DomainError):
            trace_precession(params, 1.0, 2)
        rep = observables(build_product_state(params))
        tp = t_precession(ShellSpec(21, 1), effective_l(rep))
        with pytest.raises(DomainError):
            trace_precession(params, 2.0 * tp, 4)  # needs >= 10 samples

    def test_circular_input_rejected(self):
        with pytest.raises(OrientationError):
            trace_precession(CoherentParams.planar(ShellSpec(21, 1), 0.0), 1e-6, 5)

    def test_fit_residuals_small(self):
        params = CoherentParams.planar(ShellSpec(141, 1), 0.2)
        rep = observables(build_product_state(params))
        tp = t_precession(ShellSpec(141, 1), effective_l(rep))
        trace = trace_precession(params, tp / 4.0, 26)
        fit = np.polyval(np.polyfit(trace.times, trace.thetas, 1), trace.times)
        assert float(np.sqrt(np.mean((trace.thetas - fit) ** 2))) < 0.01

    def test_csv_and_summary_round_trip(self, tmp_path):
        params = CoherentParams.planar(ShellSpec(5, 1), 0.3)
        rep = observables(build_product_state(params))
        tp = t_precession(ShellSpec(5, 1), effective_l(rep))
        trace = trace_precession(params, tp / 8.0, 5)
        csv = tmp_path / "trace.csv"
        trace.write_csv(csv)
        lines = csv.read_text().splitlines()
        assert lines[0] == "t_seconds,theta_rad,fidelity"
        assert len(lines) == 6
        summary = tmp_path / "summary.json"
        trace.write_summary(summary, extra={"tag": 1})
        import json
        data = json.loads(summary.read_text())
        assert data["tag"] == 1
        assert data["predicted_rate"] == trace.predicted_rate


class TestDenseOracle:
    @pytest.mark.parametrize("frac", [0.0, 1.0 / 7.0, 1.0 / 3.0])
    def test_production_path_matches_dense_matrices(self, frac):
        shell = ShellSpec(21, 1)
        params = CoherentParams.planar(shell, 0.2)
        rep0 = observables(build_product_state(params))
        tp = t_precession(shell, effective_l(rep0))
        t = tp * frac
        oracle = dense_evolution_oracle(shell, 0.2 + 0j, -0.2 + 0j, t)
        rep = state_observables(evolve(coupled_state(21, 0.2), zero_spec(21), t_seconds=t))
        assert np.abs(rep.L_vec - oracle["L_vec"]).max() < 1e-8
        assert np.abs(rep.A_vec - oracle["A_vec"]).max() < 1e-8
        assert abs(rep.L2 - oracle["L2"]) < 1e-8 * oracle["L2"]
        assert abs(rep.l_var - oracle["l_var"]) < 1e-8 * max(1.0, oracle["l_var"])
