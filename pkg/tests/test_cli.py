import json
import math

import pytest

from rydberg_precession.cli import main
from rydberg_precession.hydrogenic import PhysicalConstants
from rydberg_precession.verify import run_checks


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestStateCommand:
    def test_reference_scenario(self, capsys):
        code, out, _ = run_cli(capsys, "state", "--n", "141", "--eta", "0.2")
        assert code == 0
        payload = json.loads(out)
        assert abs(payload["observables"]["eccentricity"] - 0.385) < 1e-3
        assert abs(payload["semiclassical"]["t_p_seconds"] - 0.266) / 0.266 < 0.01
        assert payload["config"]["n"] == 141
        assert payload["config"]["eta"] == 0.2
        assert abs(abs(payload["dephasing"]["phi_eta"]) - 0.2517) < 1e-4

    def test_circular_scenario(self, capsys):
        code, out, _ = run_cli(capsys, "state", "--n", "141", "--eta", "0")
        assert code == 0
        payload = json.loads(out)
        # l_eff = |<L3>| = n - 1 for the circular state; no dephasing at eta=0
        assert math.isclose(payload["semiclassical"]["l_eff"], 140.0, rel_tol=1e-12)
        assert payload["dephasing"]["phi_eta"] == 0.0

    def test_zeta_pair_input(self, capsys, tmp_path):
        out_path = tmp_path / "state.json"
        code, _, _ = run_cli(capsys, "state", "--n", "21", "--zeta1", "0.2+0.1j",
                             "--zeta2=-0.2-0.1j", "--out", str(out_path))
        assert code == 0
        payload = json.loads(out_path.read_text())
        assert payload["config"]["eta"] is None
        assert payload["config"]["zeta1"] == [0.2, 0.1]
        assert "dephasing" not in payload

    def test_amplitude_dump(self, capsys, tmp_path):
        amp_path = tmp_path / "amps.csv"
        code, _, _ = run_cli(capsys, "state", "--n", "5", "--eta", "0.3",
                             "--amplitudes", str(amp_path))
        assert code == 0
        lines = amp_path.read_text().splitlines()
        assert lines[0] == "l,m,re,im"
        l, m, re, im = lines[1].split(",")
        assert 0 <= int(l) <= 4 and abs(int(m)) <= int(l)
        float(re), float(im)

    def test_deterministic_output(self, capsys, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run_cli(capsys, "state", "--n", "21", "--eta", "0.3", "--out", str(a))
        run_cli(capsys, "state", "--n", "21", "--eta", "0.3", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_config_errors_exit_2(self, capsys):
        assert run_cli(capsys, "state", "--n", "5")[0] == 2
        assert run_cli(capsys, "state", "--n", "5", "--eta", "0.2",
                       "--zeta1", "1", "--zeta2", "-1")[0] == 2
        assert run_cli(capsys, "state", "--n", "5", "--zeta1", "1")[0] == 2
        assert run_cli(capsys, "state", "--n", "5", "--eta", "0.2",
                       "--truncation", "0.5")[0] == 2
        assert run_cli(capsys, "state", "--n", "0", "--eta", "0.2")[0] == 2
        assert run_cli(capsys, "state", "--n", "5", "--zeta1", "zz",
                       "--zeta2", "1")[0] == 2


class TestEvolveCommand:
    def test_quarter_period_trace(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, "evolve", "--n", "21", "--eta", "0.2",
                             "--t-max", "0.25Tp", "--samples", "12",
                             "--outdir", str(tmp_path))
        assert code == 0
        summary = json.loads((tmp_path / "trace_summary.json").read_text())
        assert summary["relative_error"] < 0.05
        assert summary["config"]["n"] == 21
        rows = (tmp_path / "trace.csv").read_text().splitlines()
        assert rows[0] == "t_seconds,theta_rad,fidelity"
        assert len(rows) == 13
        first = rows[1].split(",")
        assert float(first[0]) == 0.0 and float(first[1]) == 0.0
        assert abs(float(first[2]) - 1.0) < 1e-10

    def test_zero_time_degenerate_trace(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, "evolve", "--n", "21", "--eta", "0.2",
                             "--t-max", "0s", "--samples", "1",
                             "--outdir", str(tmp_path))
        assert code == 0
        rows = (tmp_path / "trace.csv").read_text().splitlines()
        assert rows[1] == "0.0,0.0,1.0"

    def test_fidelity_ordering_across_eta(self, capsys, tmp_path):
        fids = {}
        for eta in ("0.2", "0.4"):
            out = tmp_path / eta
            run_cli(capsys, "evolve", "--n", "141", "--eta", eta,
                    "--t-max", "0.25Tp", "--samples", "26", "--outdir", str(out))
            fids[eta] = json.loads((out / "trace_summary.json").read_text())["final_fidelity"]
        assert fids["0.4"] < fids["0.2"]

    def test_bad_samples(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, "evolve", "--n", "21", "--eta", "0.2",
                             "--t-max", "1Tp", "--samples", "2",
                             "--outdir", str(tmp_path))
        assert code == 2


class TestDensityCommand:
    def test_minimal_grid_and_header(self, capsys, tmp_path):
        out = tmp_path / "d.grid.csv"
        code, _, _ = run_cli(capsys, "density", "--n", "21", "--eta", "0.3",
                             "--time", "0s", "--extent", "1800", "--res", "16",
                             "--out", str(out))
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "extent_au,1800.0"
        assert lines[1] == "resolution,16"
        assert lines[2] == "time_s,0.0"
        assert lines[3] == "n,21"
        assert lines[4] == "Z,1"
        assert lines[5] == "eta,0.3"
        assert len(lines) == 6 + 16
        assert len(lines[6].split(",")) == 16
        sidecar = json.loads((tmp_path / "d.grid.csv.json").read_text())
        assert sidecar["config"]["resolution"] == 16

    def test_default_extent_matches_field_of_view(self, capsys, tmp_path):
        out = tmp_path / "d.grid.csv"
        code, _, _ = run_cli(capsys, "density", "--n", "21", "--eta", "0.3",
                             "--time", "0s", "--res", "16", "--out", str(out))
        assert code == 0
        assert out.read_text().splitlines()[0] == "extent_au,80000.0"


class TestFiguresCommand:
    def test_curve_files_and_grids(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, "figures", "--n", "21", "--res", "16",
                             "--extent", "1800", "--outdir", str(tmp_path))
        assert code == 0

        fig1 = (tmp_path / "fig1.csv").read_text().splitlines()
        assert fig1[0] == "eta,eps"
        row = dict(tuple(line.split(",")) for line in fig1[1:])
        assert abs(float(row["0.2"]) - 0.385) < 1e-3
        assert abs(float(row["0.3"]) - 0.550) < 1e-3
        assert abs(float(row["0.4"]) - 0.690) < 1e-3

        fig2 = (tmp_path / "fig2.csv").read_text().splitlines()
        assert fig2[0] == "eps,abs_dphi_lower,abs_dphi_upper"
        lower = [float(line.split(",")[1]) for line in fig2[1:]]
        assert lower[0] == 0.0
        assert all(b >= a for a, b in zip(lower, lower[1:]))  # monotone branch

        manifest = json.loads((tmp_path / "fig3_manifest.json").read_text())
        assert len(manifest["panels"]) == 6
        for panel in manifest["panels"]:
            assert (tmp_path / panel["grid"]).exists()
            assert (tmp_path / panel["overlay"]).exists()
        quarter = [p for p in manifest["panels"] if p["time_seconds"] > 0.0]
        assert all(abs(abs(p["rotation"]) - math.pi / 2.0) < 1e-9 for p in quarter)


class TestVerifyCommand:
    def test_quick_suite_passes(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--quick")
        assert code == 0
        assert "FAIL" not in out

    def test_alpha_sensitivity_guard(self):
        # a 1% alpha perturbation must break the precession-period regression
        perturbed = PhysicalConstants(alpha=7.2973525693e-3 * 1.01)
        results = run_checks(quick=True, constants=perturbed)
        failed = {r.name for r in results if not r.passed}
        assert "precession period 0.266 s (eta=0.2)" in failed
