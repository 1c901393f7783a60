"""Time evolution in a shell, precession extraction, and shape fidelity.

Within one shell the unperturbed energy is a global phase, so only the
first-order l-dependent corrections evolve the state.  Phases are taken
relative to a reference l near the angular-momentum peak and reduced
mod 2 pi in double-double arithmetic: at t ~ T_p the raw relative
phases reach ~1e5 rad and must not leak rounding into the angles.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .coherent import (
    CoherentParams,
    CoupledState,
    ObservableReport,
    build_product_state,
    effective_l,
    observables,
    to_coupled,
    to_product,
)
from .errors import ContractError, DomainError, OrientationError
from .hydrogenic import (
    DEFAULT_CONSTANTS,
    PhysicalConstants,
    ShellSpec,
    energy0,
    energy1,
    energy1_difference,
    t_precession,
)

__all__ = [
    "TimeSpec",
    "EvolutionSpec",
    "PrecessionTrace",
    "evolve",
    "rotate_about_z",
    "overlap",
    "precession_angle",
    "trace_precession",
]

_SPLITTER = 134217729.0  # 2^27 + 1, Veltkamp splitting constant
_TWO_PI_HI = 6.283185307179586
_TWO_PI_LO = 2.4492935982947064e-16


def _two_prod(a: float, b: float) -> tuple[float, float]:
    p = a * b
    ta = _SPLITTER * a
    ahi = ta - (ta - a)
    alo = a - ahi
    tb = _SPLITTER * b
    bhi = tb - (tb - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def phase_mod_two_pi(omega: float, t: float) -> float:
    """omega * t reduced into (-pi, pi] without losing low bits.

    The product is formed error-free (two_prod); subtracting k * 2pi
    uses a double-double representation of 2pi, so the result is
    accurate to ~1 ulp even for raw phases of 1e11 rad.
    """
    p, e = _two_prod(omega, t)
    k = round(p / _TWO_PI_HI)
    if k == 0:
        return p + e
    qh, qe = _two_prod(float(k), _TWO_PI_HI)
    # p and qh agree to within pi, so this subtraction is exact.
    r = (p - qh) + (e - qe - float(k) * _TWO_PI_LO)
    return r


@dataclass(frozen=True)
class TimeSpec:
    """A time with an explicit unit: seconds, classical or precession periods."""

    value: float
    unit: str  # "s" | "Tcl" | "Tp"

    def __post_init__(self):
        if self.unit not in ("s", "Tcl", "Tp"):
            raise DomainError(f"unknown time unit {self.unit!r}")
        if self.value < 0.0:
            raise DomainError("time must be non-negative")

    @classmethod
    def parse(cls, text: str) -> "TimeSpec":
        """Parse literals like '0.25Tp', '3Tcl', '1e-10s'."""
        text = text.strip()
        for unit in ("Tcl", "Tp", "s"):
            if text.endswith(unit):
                return cls(value=float(text[: -len(unit)]), unit=unit)
        raise DomainError(f"time {text!r} needs a unit suffix (s, Tcl or Tp)")

    def seconds(self, t_cl: float, t_p: float) -> float:
        if self.unit == "s":
            return self.value
        return self.value * (t_cl if self.unit == "Tcl" else t_p)


@dataclass(frozen=True)
class EvolutionSpec:
    """Evolution request: target shell, time, and global-phase handling."""

    shell: ShellSpec
    time: TimeSpec
    drop_global_phase: bool = True


def _l_reference(state: CoupledState) -> int:
    """round(|<L3>|), clipped into the shell; <L3> is diagonal here."""
    n = state.shell.n
    m = np.arange(2 * n - 1) - (n - 1)
    l3 = float(np.sum(m * np.sum(np.abs(state.amps) ** 2, axis=0)))
    return min(max(int(round(abs(l3))), 0), n - 1)


def evolve(state: CoupledState, spec: EvolutionSpec,
           constants: PhysicalConstants = DEFAULT_CONSTANTS,
           t_seconds: float | None = None) -> CoupledState:
    """Apply the first-order phases exp(-i E1(l) t) to each l row.

    The E0 (and reference-l) phase is global within the shell and is
    dropped unless spec says otherwise.  t_seconds overrides spec.time
    when the caller has already resolved period units.
    """
    if state.shell != spec.shell:
        raise ContractError(f"state shell {state.shell} != spec shell {spec.shell}")
    if t_seconds is None:
        if spec.time.unit != "s":
            raise DomainError("resolve Tcl/Tp times to seconds before evolve()")
        t_seconds = spec.time.value
    if t_seconds < 0.0:
        raise DomainError("time must be non-negative")

    shell = state.shell
    t_au = t_seconds / constants.atomic_time_si
    l_ref = _l_reference(state)
    amps = state.amps.copy()
    for l in np.nonzero(np.any(amps != 0.0, axis=1))[0]:
        d_e = energy1_difference(shell, int(l), l_ref, constants)
        phi = phase_mod_two_pi(d_e, t_au)
        amps[l, :] *= complex(math.cos(phi), -math.sin(phi))
    if not spec.drop_global_phase:
        e_global = energy0(shell, constants) + energy1(shell, l_ref, constants)
        phi = phase_mod_two_pi(e_global, t_au)
        amps *= complex(math.cos(phi), -math.sin(phi))
    return CoupledState(shell=shell, amps=amps)


def rotate_about_z(state: CoupledState, theta: float) -> CoupledState:
    """Rigid rotation about z: amplitude (l, m) picks up exp(-i m theta)."""
    n = state.shell.n
    m = np.arange(2 * n - 1) - (n - 1)
    phases = np.exp(-1j * m * theta)
    return CoupledState(shell=state.shell, amps=state.amps * phases[None, :])


def overlap(a: CoupledState, b: CoupledState) -> complex:
    if a.shell != b.shell:
        raise ContractError("overlap of states from different shells")
    return complex(np.sum(np.conj(a.amps) * b.amps))


def state_observables(state: CoupledState) -> ObservableReport:
    """Observables of a coupled state via the product-basis ladder sums."""
    return observables(to_product(state))


def precession_angle(state: CoupledState) -> float:
    """atan2(<A2>, <A1>): in-plane orientation of the Runge-Lenz vector."""
    rep = state_observables(state)
    a_norm = float(np.hypot(rep.A_vec[0], rep.A_vec[1]))
    if a_norm <= 1e-6 * state.shell.n:
        raise OrientationError("orientation undefined: |<A>| is at the circular-state floor")
    return math.atan2(rep.A_vec[1], rep.A_vec[0])


@dataclass
class PrecessionTrace:
    """Sampled precession angles and shape fidelity with the fitted rate."""

    times: np.ndarray  # seconds
    thetas: np.ndarray  # radians, unwrapped, theta(0) = 0
    fidelities: np.ndarray
    fitted_rate: float  # radians / second (signed slope)
    predicted_rate: float  # 2 pi / T_p
    relative_error: float

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("t_seconds,theta_rad,fidelity\n")
            for t, th, f in zip(self.times, self.thetas, self.fidelities):
                fh.write(f"{float(t)!r},{float(th)!r},{float(f)!r}\n")

    def summary(self) -> dict:
        return {
            "fitted_rate": self.fitted_rate,
            "predicted_rate": self.predicted_rate,
            "relative_error": self.relative_error,
        }

    def write_summary(self, path, extra: dict | None = None) -> None:
        payload = dict(extra or {})
        payload.update(self.summary())
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def trace_precession(params: CoherentParams, t_max_seconds: float, n_samples: int,
                     constants: PhysicalConstants = DEFAULT_CONSTANTS,
                     l_eff_mode: str = "l3",
                     truncation: float = 1e-12) -> PrecessionTrace:
    """Sample theta(t) and fidelity over [0, t_max] and fit the rate.

    Fidelity compares the evolved state against the rigidly rotated
    initial state, which turns "remains localized on the ellipse" into
    a scalar.  The sample count must keep consecutive angle steps well
    below the pi unwrap threshold.
    """
    if n_samples < 3:
        raise DomainError("need at least 3 samples")
    shell = params.shell
    psi0_p = build_product_state(params, truncation)
    rep0 = observables(psi0_p)
    a_norm = float(np.hypot(rep0.A_vec[0], rep0.A_vec[1]))
    if a_norm <= 1e-6 * shell.n:
        raise OrientationError("circular state: precession angle undefined")
    psi0 = to_coupled(psi0_p)

    l_eff = effective_l(rep0, l_eff_mode)
    t_p = t_precession(shell, l_eff, constants)
    needed = math.ceil(4.0 * t_max_seconds / t_p) + 2
    if n_samples < needed:
        raise DomainError(
            f"{n_samples} samples cannot resolve {t_max_seconds / t_p:.3g} precession "
            f"periods without unwrap ambiguity; need >= {needed}"
        )

    times = np.linspace(0.0, t_max_seconds, n_samples)
    thetas_raw = np.empty(n_samples)
    fidelities = np.empty(n_samples)
    spec = EvolutionSpec(shell=shell, time=TimeSpec(0.0, "s"))
    for i, t in enumerate(times):
        psi_t = evolve(psi0, spec, constants, t_seconds=float(t))
        theta = precession_angle(psi_t)
        thetas_raw[i] = theta
        reference = rotate_about_z(psi0, theta)
        fidelities[i] = abs(overlap(reference, psi_t)) ** 2

    thetas = np.unwrap(thetas_raw)
    thetas -= thetas[0]
    fitted = float(np.polyfit(times, thetas, 1)[0]) if n_samples > 1 else 0.0
    predicted = 2.0 * math.pi / t_p
    rel = abs(abs(fitted) - predicted) / predicted
    return PrecessionTrace(
        times=times,
        thetas=thetas,
        fidelities=fidelities,
        fitted_rate=fitted,
        predicted_rate=predicted,
        relative_error=rel,
    )
