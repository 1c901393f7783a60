"""Command-line front end: scenario configuration, unit bridging, file emission.

Commands: state, evolve, density, figures, verify.  Exit codes: 0 on
success, 2 for configuration errors, 3 for verification failures, 4 for
I/O failures.  All emitted files are deterministic for a fixed config:
floats are written as shortest round-trip decimals and JSON keys sorted.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

from . import verify as verify_mod
from .coherent import (
    CoherentParams,
    build_product_state,
    dephasing_phi_eta,
    effective_l,
    eccentricity_of_eta,
    observables,
    to_coupled,
)
from .dynamics import (
    EvolutionSpec,
    TimeSpec,
    evolve,
    precession_angle,
    trace_precession,
)
from .errors import ContractError, DomainError, OrientationError
from .hydrogenic import (
    DEFAULT_CONSTANTS,
    ShellSpec,
    dephasing_test_l,
    semiclassical_report,
)
from .render import classical_overlay, density_grid, principal_axis, write_grid, write_overlay

OUTDIR_ENV = "RYDBERG_PRECESSION_OUTDIR"


@dataclass
class ScenarioConfig:
    n: int
    Z: int
    eta: float | None
    zeta1: complex
    zeta2: complex
    truncation: float
    l_eff_mode: str
    time: str | None = None
    extent: float | None = None
    resolution: int | None = None

    def as_dict(self) -> dict:
        out = {
            "n": self.n,
            "Z": self.Z,
            "eta": self.eta,
            "zeta1": [self.zeta1.real, self.zeta1.imag],
            "zeta2": [self.zeta2.real, self.zeta2.imag],
            "truncation": self.truncation,
            "l_eff_mode": self.l_eff_mode,
        }
        for key in ("time", "extent", "resolution"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out


class ConfigError(Exception):
    pass


def _build_config(args) -> ScenarioConfig:
    has_eta = args.eta is not None
    has_zeta = args.zeta1 is not None or args.zeta2 is not None
    if has_eta == has_zeta:
        raise ConfigError("provide exactly one of --eta or the --zeta1/--zeta2 pair")
    if has_zeta and (args.zeta1 is None or args.zeta2 is None):
        raise ConfigError("--zeta1 and --zeta2 must be given together")
    if has_eta:
        if args.eta < 0.0:
            raise ConfigError("--eta must be non-negative")
        zeta1, zeta2 = complex(args.eta), complex(-args.eta)
    else:
        try:
            zeta1, zeta2 = complex(args.zeta1), complex(args.zeta2)
        except ValueError as exc:
            raise ConfigError(f"bad complex literal: {exc}") from exc
    if not (0.0 <= args.truncation < 1e-6):
        raise ConfigError("--truncation must be in [0, 1e-6)")
    return ScenarioConfig(
        n=args.n,
        Z=args.Z,
        eta=args.eta if has_eta else None,
        zeta1=zeta1,
        zeta2=zeta2,
        truncation=args.truncation,
        l_eff_mode=args.l_eff_mode,
        time=getattr(args, "time", None),
        extent=getattr(args, "extent", None),
        resolution=getattr(args, "res", None),
    )


def _resolve_out(path: str, outdir: str | None) -> str:
    if os.path.isabs(path):
        return path
    base = outdir or os.environ.get(OUTDIR_ENV) or "."
    os.makedirs(base, exist_ok=True)
    return os.path.join(base, path)


def _write_json(path: str | None, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _state_bundle(config: ScenarioConfig, constants=DEFAULT_CONSTANTS):
    shell = ShellSpec(config.n, config.Z)
    params = CoherentParams(shell=shell, zeta1=config.zeta1, zeta2=config.zeta2)
    product = build_product_state(params, config.truncation)
    report = observables(product)
    return shell, params, product, report


def _scenario_json(config: ScenarioConfig, shell, report, constants=DEFAULT_CONSTANTS) -> dict:
    l_eff = effective_l(report, config.l_eff_mode)
    semi = semiclassical_report(shell, l_eff, constants)
    payload = {
        "config": config.as_dict(),
        "observables": report.as_dict(),
        "semiclassical": {
            "l_eff": semi.l_eff,
            "t_cl_seconds": semi.t_cl,
            "t_p_seconds": semi.t_p,
            "ratio": semi.ratio,
            "delta_omega": semi.delta_omega,
        },
    }
    if config.eta is not None and config.eta != 1.0:
        payload["dephasing"] = {
            "phi_eta": dephasing_phi_eta(config.eta),
            "phi_from_variance": dephasing_test_l(l_eff, report.l_var / 2.0),
        }
    elif config.eta == 1.0:
        payload["dephasing"] = None  # diverges on the degenerate linear orbit
    return payload


def cmd_state(args) -> int:
    config = _build_config(args)
    shell, _, product, report = _state_bundle(config)
    payload = _scenario_json(config, shell, report)
    out = _resolve_out(args.out, args.outdir) if args.out else None
    _write_json(out, payload)
    if args.amplitudes:
        coupled = to_coupled(product)
        path = _resolve_out(args.amplitudes, args.outdir)
        with open(path, "w") as fh:
            fh.write("l,m,re,im\n")
            n = shell.n
            for l in range(n):
                for col in range(2 * n - 1):
                    a = coupled.amps[l, col]
                    if a != 0.0:
                        fh.write(f"{l},{col - (n - 1)},{float(a.real)!r},{float(a.imag)!r}\n")
    return 0


def _resolve_seconds(spec_text: str, shell, report, mode: str) -> tuple[float, TimeSpec, float]:
    tspec = TimeSpec.parse(spec_text)
    semi = semiclassical_report(shell, effective_l(report, mode))
    return tspec.seconds(semi.t_cl, semi.t_p), tspec, semi.t_p


def cmd_evolve(args) -> int:
    config = _build_config(args)
    shell, params, _, report = _state_bundle(config)
    t_max, tspec, _ = _resolve_seconds(args.t_max, shell, report, config.l_eff_mode)
    if args.samples < 1:
        raise ConfigError("--samples must be >= 1")
    if t_max == 0.0 or args.samples < 3:
        # Degenerate trace: a single point at t = 0 (or repeated t), no fit.
        if t_max > 0.0:
            raise ConfigError("need --samples >= 3 for a nonzero time span")
        trace_payload = {
            "config": config.as_dict(),
            "fitted_rate": 0.0,
            "predicted_rate": None,
            "relative_error": None,
        }
        csv_path = _resolve_out(args.out, args.outdir)
        with open(csv_path, "w") as fh:
            fh.write("t_seconds,theta_rad,fidelity\n")
            fh.write("0.0,0.0,1.0\n")
        _write_json(_resolve_out(args.summary, args.outdir), trace_payload)
        return 0
    trace = trace_precession(params, t_max, args.samples,
                             l_eff_mode=config.l_eff_mode, truncation=config.truncation)
    csv_path = _resolve_out(args.out, args.outdir)
    trace.write_csv(csv_path)
    trace.write_summary(_resolve_out(args.summary, args.outdir),
                        extra={"config": config.as_dict(), "t_max": args.t_max,
                               "final_fidelity": float(trace.fidelities[-1])})
    return 0


def cmd_density(args) -> int:
    config = _build_config(args)
    shell, _, product, report = _state_bundle(config)
    seconds, _, _ = _resolve_seconds(args.time, shell, report, config.l_eff_mode)
    coupled = to_coupled(product)
    espec = EvolutionSpec(shell=shell, time=TimeSpec(0.0, "s"))
    state = evolve(coupled, espec, t_seconds=seconds)
    grid = density_grid(state, extent=args.extent, resolution=args.res, time=seconds)
    path = _resolve_out(args.out, args.outdir)
    write_grid(path, grid, shell, config.eta)
    _write_json(path + ".json", {"config": config.as_dict(), "time_seconds": seconds})
    return 0


def cmd_figures(args) -> int:
    outdir = args.outdir or os.environ.get(OUTDIR_ENV) or "."
    os.makedirs(outdir, exist_ok=True)

    # Fig. 1 data: eccentricity versus the coherent-state parameter.
    with open(os.path.join(outdir, "fig1.csv"), "w") as fh:
        fh.write("eta,eps\n")
        for i in range(0, 501):
            eta = i / 100.0
            fh.write(f"{eta!r},{eccentricity_of_eta(eta)!r}\n")

    # Fig. 2 data: |dephasing phase| versus eccentricity, both branches.
    from .coherent import dephasing_phi_eps
    with open(os.path.join(outdir, "fig2.csv"), "w") as fh:
        fh.write("eps,abs_dphi_lower,abs_dphi_upper\n")
        for i in range(0, 199):
            eps = i * 0.005
            lo = abs(dephasing_phi_eps(eps, "lower"))
            hi = abs(dephasing_phi_eps(eps, "upper"))
            fh.write(f"{eps!r},{lo!r},{hi!r}\n")

    # Fig. 3 data: density grids and precessed classical overlays.
    shell = ShellSpec(args.n, args.Z)
    manifest = {"config": {"n": args.n, "Z": args.Z, "resolution": args.res,
                           "extent": args.extent, "l_eff_mode": args.l_eff_mode},
                "panels": []}
    for eta in (0.2, 0.3, 0.4):
        params = CoherentParams.planar(shell, eta)
        product = build_product_state(params)
        report = observables(product)
        semi = semiclassical_report(shell, effective_l(report, args.l_eff_mode))
        coupled = to_coupled(product)
        espec = EvolutionSpec(shell=shell, time=TimeSpec(0.0, "s"))
        eps = eccentricity_of_eta(eta)
        for tag, seconds in (("t0", 0.0), ("tq", semi.t_p / 4.0)):
            state = evolve(coupled, espec, t_seconds=seconds)
            grid = density_grid(state, extent=args.extent, resolution=args.res, time=seconds)
            grid_path = os.path.join(outdir, f"fig3_eta{eta}_{tag}.grid.csv")
            write_grid(grid_path, grid, shell, eta)
            # Overlay precessed at the special-relativistic rate, with the
            # measured sense of rotation.
            if seconds == 0.0:
                theta = 0.0
            else:
                sense = math.copysign(1.0, precession_angle(state))
                theta = sense * 2.0 * math.pi * seconds / semi.t_p
            overlay = classical_overlay(shell, eps, theta)
            overlay_path = os.path.join(outdir, f"fig3_eta{eta}_{tag}.overlay.csv")
            write_overlay(overlay_path, overlay)
            manifest["panels"].append({
                "eta": eta, "eps": eps, "time_seconds": seconds,
                "grid": os.path.basename(grid_path),
                "overlay": os.path.basename(overlay_path),
                "rotation": theta,
            })
    _write_json(os.path.join(outdir, "fig3_manifest.json"), manifest)
    return 0


def cmd_verify(args) -> int:
    results = verify_mod.run_checks(quick=args.quick)
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status}  {res.name}" + (f"  [{res.detail}]" if res.detail else ""))
        failed += 0 if res.passed else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 3


def _add_state_flags(p: argparse.ArgumentParser, with_geometry=False, with_time=False):
    p.add_argument("--n", type=int, required=True, help="principal quantum number")
    p.add_argument("--Z", type=int, default=1, help="atomic number (default 1)")
    p.add_argument("--eta", type=float, default=None,
                   help="planar coherent parameter (zeta1=eta, zeta2=-eta)")
    p.add_argument("--zeta1", default=None, help="complex literal, e.g. '0.2+0.1j'")
    p.add_argument("--zeta2", default=None, help="complex literal")
    p.add_argument("--truncation", type=float, default=1e-12,
                   help="relative amplitude cutoff (default 1e-12)")
    p.add_argument("--l-eff-mode", default="l3", choices=("l3", "l3_plus_half", "sqrt_l2"),
                   help="how the effective (l+1/2) is extracted (default l3 = |<L3>|)")
    p.add_argument("--outdir", default=None,
                   help=f"output directory (default $%s or .)" % OUTDIR_ENV)
    if with_time:
        p.add_argument("--time", default="0s",
                       help="evolution time with unit suffix: s, Tcl or Tp (e.g. 0.25Tp)")
    if with_geometry:
        p.add_argument("--extent", type=float, default=8.0e4,
                       help="grid full width in atomic units (default 8e4 = 4.23 um)")
        p.add_argument("--res", type=int, default=512, help="pixels per side (default 512)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydberg-precession",
        description="SO(4) coherent states on Kepler ellipses and their "
                    "special-relativistic precession in a hydrogenic shell.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", help="build a state and report its observables")
    _add_state_flags(p)
    p.add_argument("--out", default=None, help="JSON output path (default stdout)")
    p.add_argument("--amplitudes", default=None, help="optional coupled-amplitude CSV dump")
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("evolve", help="trace the precession angle and fidelity")
    _add_state_flags(p)
    p.add_argument("--t-max", required=True, help="trace span, unit-suffixed (e.g. 0.25Tp)")
    p.add_argument("--samples", type=int, default=26, help="number of samples (default 26)")
    p.add_argument("--out", default="trace.csv", help="trace CSV path")
    p.add_argument("--summary", default="trace_summary.json", help="JSON summary path")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("density", help="evaluate |psi|^2 on the orbital plane")
    _add_state_flags(p, with_geometry=True, with_time=True)
    p.add_argument("--out", default="density.grid.csv", help="grid file path")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("figures", help="emit CSV/grid data behind the reference figures")
    p.add_argument("--n", type=int, default=141)
    p.add_argument("--Z", type=int, default=1)
    p.add_argument("--extent", type=float, default=8.0e4)
    p.add_argument("--res", type=int, default=512)
    p.add_argument("--l-eff-mode", default="l3", choices=("l3", "l3_plus_half", "sqrt_l2"))
    p.add_argument("--outdir", default=None)
    p.set_defaults(func=cmd_figures)

    p = sub.add_parser("verify", help="run the built-in verification suite")
    p.add_argument("--quick", action="store_true",
                   help="skip the n=141 grid checks; all n<=21 oracles still run")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError, ContractError, OrientationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        path = getattr(exc, "filename", None)
        print(f"I/O error{f' on {path}' if path else ''}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
