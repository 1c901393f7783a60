"""Hydrogenic energies, semiclassical time scales and basis functions.

Everything internal is in Hartree atomic units (hbar = m = e = 1,
c = 1/alpha); SI conversions happen only at reporting boundaries.
The basis functions are written for principal quantum numbers up to
~200, where naive factorials and Laguerre values overflow doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .amath import HalfInt, _LF
from .errors import DomainError

__all__ = [
    "PhysicalConstants",
    "DEFAULT_CONSTANTS",
    "ShellSpec",
    "SemiclassicalReport",
    "energy0",
    "energy1",
    "t_classical",
    "mean_radius",
    "t_precession",
    "precession_rate_sr",
    "precession_rate_classical_gravity",
    "semiclassical_report",
    "dephasing_test_n",
    "dephasing_test_l",
    "radial_wavefunction",
    "sph_harm",
    "sph_harm_equatorial",
    "equatorial_ylm_matrix",
]

SPEED_OF_LIGHT_SI = 299792458.0  # m/s, exact
HBAR_SI = 1.054571817e-34  # J s, exact in the 2019 SI


@dataclass(frozen=True)
class PhysicalConstants:
    """Fine-structure constant and the SI bridges of the atomic unit system."""

    alpha: float = 7.2973525693e-3
    atomic_time_si: float = 2.4188843265857e-17  # seconds per atomic time unit
    bohr_radius_si: float = 5.29177210903e-11  # meters per atomic length unit


DEFAULT_CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class ShellSpec:
    """A fixed hydrogenic shell (n, Z); all states live inside it."""

    n: int
    Z: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("principal quantum number n must be >= 1")
        if self.Z < 1:
            raise DomainError("atomic number Z must be >= 1")

    @property
    def j(self) -> HalfInt:
        """Spin of each SO(3) factor: j = (n-1)/2."""
        return HalfInt(self.n - 1)


def energy0(shell: ShellSpec, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Unperturbed shell energy -Z^2/(2 n^2) in hartree."""
    return -shell.Z**2 / (2.0 * shell.n**2)


def energy1(shell: ShellSpec, l: int, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """First-order kinetic-relativistic correction in hartree.

    -(Z^4 alpha^2 / 2 n^3) (1/(l+1/2) - 3/(4n)); splits the shell
    degeneracy in l, which is what drives the precession.
    """
    n, Z = shell.n, shell.Z
    if l < 0 or l > n - 1:
        raise DomainError(f"l={l} outside 0..{n - 1}")
    return -(Z**4 * constants.alpha**2 / (2.0 * n**3)) * (1.0 / (l + 0.5) - 3.0 / (4.0 * n))


def energy1_difference(shell: ShellSpec, l: int, l_ref: int,
                       constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """energy1(l) - energy1(l_ref), evaluated in difference form.

    (1/(l+1/2) - 1/(lr+1/2)) = (lr-l)/((l+1/2)(lr+1/2)) keeps full
    relative accuracy for nearby l, which the evolution phases need.
    """
    n, Z = shell.n, shell.Z
    for lv in (l, l_ref):
        if lv < 0 or lv > n - 1:
            raise DomainError(f"l={lv} outside 0..{n - 1}")
    diff = (l_ref - l) / ((l + 0.5) * (l_ref + 0.5))
    return -(Z**4 * constants.alpha**2 / (2.0 * n**3)) * diff


def t_classical(shell: ShellSpec, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Classical Kepler period 2 pi n^3 / Z^2 atomic time units, in seconds."""
    return 2.0 * math.pi * shell.n**3 / shell.Z**2 * constants.atomic_time_si


def mean_radius(shell: ShellSpec) -> float:
    """Shell radial expectation n^2/Z in atomic length units."""
    return shell.n**2 / shell.Z


def t_precession(shell: ShellSpec, l_eff: float,
                 constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Precession period (4 pi n^3 / Z^4 alpha^2) l_eff^2 atomic units, in seconds.

    l_eff is the effective (l + 1/2) entering the period; see
    coherent.effective_l for how it is extracted from a state.
    """
    if l_eff <= 0.0:
        raise DomainError("l_eff must be positive")
    n, Z = shell.n, shell.Z
    atu = 4.0 * math.pi * n**3 * l_eff**2 / (Z**4 * constants.alpha**2)
    return atu * constants.atomic_time_si


def precession_rate_sr(Z: int, l_eff: float,
                       constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Special-relativistic perihelion advance pi Z^2 alpha^2 / l_eff^2, rad per classical period."""
    if l_eff <= 0.0:
        raise DomainError("l_eff must be positive")
    return math.pi * Z**2 * constants.alpha**2 / l_eff**2


def precession_rate_classical_gravity(gmm: float, ang_mom: float, *,
                                      general_relativity: bool = False) -> float:
    """Classical perihelion advance pi (GMm)^2 / (c L)^2 per period, SI inputs.

    With general_relativity=True the prefactor becomes 6 pi, the rate
    observed for Mercury; the default is the special-relativistic form.
    Substituting gmm -> Z e^2 (Gaussian) = Z alpha hbar c and
    ang_mom -> hbar l_eff reproduces precession_rate_sr exactly.
    """
    if gmm <= 0.0 or ang_mom <= 0.0:
        raise DomainError("gmm and ang_mom must be positive")
    factor = 6.0 if general_relativity else 1.0
    return factor * math.pi * gmm**2 / (SPEED_OF_LIGHT_SI**2 * ang_mom**2)


@dataclass(frozen=True)
class SemiclassicalReport:
    """Period scales and per-period precession angle for one (shell, l_eff)."""

    t_cl: float  # seconds
    t_p: float  # seconds
    ratio: float  # t_p / t_cl
    delta_omega: float  # radians per classical period
    l_eff: float


def semiclassical_report(shell: ShellSpec, l_eff: float,
                         constants: PhysicalConstants = DEFAULT_CONSTANTS) -> SemiclassicalReport:
    tcl = t_classical(shell, constants)
    tp = t_precession(shell, l_eff, constants)
    ratio = 2.0 * l_eff**2 / (shell.Z**2 * constants.alpha**2)
    return SemiclassicalReport(
        t_cl=tcl,
        t_p=tp,
        ratio=ratio,
        delta_omega=precession_rate_sr(shell.Z, l_eff, constants),
        l_eff=l_eff,
    )


def dephasing_test_n(n_mean: float, n_var: float) -> float:
    """Quadratic-dephasing phase 3 pi (Delta n)^2 / <n> after one classical period."""
    if n_mean <= 0.0 or n_var < 0.0:
        raise DomainError("need n_mean > 0 and n_var >= 0")
    return 3.0 * math.pi * n_var / n_mean


def dephasing_test_l(l_eff: float, l_var: float) -> float:
    """Quadratic-dephasing phase 2 pi (Delta l)^2 / l_eff after one precession period."""
    if l_eff <= 0.0 or l_var < 0.0:
        raise DomainError("need l_eff > 0 and l_var >= 0")
    return 2.0 * math.pi * l_var / l_eff


# ---------------------------------------------------------------------------
# Position-space basis functions
# ---------------------------------------------------------------------------

_RESCALE_HI = 1e150
_RESCALE_LO = 1e-150


def radial_wavefunction(shell: ShellSpec, l: int, r):
    """Normalized hydrogenic R_nl(r) in atomic units, for scalar or array r.

    The associated Laguerre factor is generated by the three-term
    recurrence in the degree with per-element renormalization whenever
    magnitudes leave [1e-150, 1e150]; the running scale plus the r^l
    and exponential factors are recombined in log space at the end, so
    l ~ 140 and r ~ 1e5 stay finite.  Returns 0 where the true value
    underflows doubles.
    """
    n, Z = shell.n, shell.Z
    if l < 0 or l > n - 1:
        raise DomainError(f"l={l} outside 0..{n - 1}")
    r_arr = np.asarray(r, dtype=float)
    scalar = r_arr.ndim == 0
    r_arr = np.atleast_1d(r_arr)
    if np.any(r_arr < 0.0):
        raise DomainError("r must be non-negative")

    rho = 2.0 * Z * r_arr / n
    alpha = 2 * l + 1
    k_top = n - l - 1

    # L^(alpha)_k(rho) with running per-element log scale.
    v_prev = np.ones_like(rho)
    log_scale = np.zeros_like(rho)
    if k_top == 0:
        v = v_prev
    else:
        v = 1.0 + alpha - rho
        for k in range(1, k_top):
            v_next = ((2.0 * k + 1.0 + alpha - rho) * v - (k + alpha) * v_prev) / (k + 1.0)
            v_prev, v = v, v_next
            mag = np.maximum(np.abs(v), np.abs(v_prev))
            bad = (mag > _RESCALE_HI) | ((mag > 0.0) & (mag < _RESCALE_LO))
            if np.any(bad):
                scale = np.where(bad, mag, 1.0)
                v = v / scale
                v_prev = v_prev / scale
                log_scale = log_scale + np.where(bad, np.log(scale), 0.0)

    log_norm = 1.5 * math.log(2.0 * Z / n) + 0.5 * (
        float(_LF[k_top]) - math.log(2.0 * n) - float(_LF[n + l])
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        log_r_part = np.where(rho > 0.0, l * np.log(rho), 0.0)
        log_mag = log_norm + log_r_part - 0.5 * rho + log_scale + np.where(
            v != 0.0, np.log(np.abs(v)), -np.inf
        )
    out = np.sign(v) * np.exp(log_mag)
    if l > 0:
        out = np.where(rho == 0.0, 0.0, out)
    return float(out[0]) if scalar else out


def _legendre_column(lmax: int, m: int, x):
    """Normalized associated Legendre column P~_l^m(x) for l = m..lmax.

    Includes the Condon-Shortley (-1)^m and the sqrt((2l+1)(l-m)!/(4pi (l+m)!))
    normalization; the (sin theta)^m seed is assembled in log space.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    cols = lmax - m + 1
    out = np.zeros((cols, len(x)))

    log_seed = 0.5 * (
        math.log(2 * m + 1.0) - math.log(4.0 * math.pi)
        + float(_LF[2 * m]) - 2 * m * math.log(2.0) - 2.0 * float(_LF[m])
    )
    if m == 0:
        pmm = np.full_like(x, math.exp(log_seed))
    else:
        s2 = np.maximum(1.0 - x * x, 0.0)
        with np.errstate(divide="ignore"):
            pmm = (-1.0) ** m * np.exp(log_seed + 0.5 * m * np.log(s2, where=s2 > 0.0,
                                                                   out=np.full_like(s2, -np.inf)))
    out[0] = pmm
    if cols == 1:
        return out
    out[1] = x * math.sqrt(2.0 * m + 3.0) * pmm
    for l in range(m + 2, lmax + 1):
        a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
        b = math.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
        out[l - m] = a * (x * out[l - m - 1] - b * out[l - m - 2])
    return out


def sph_harm(l: int, m: int, theta, phi) -> complex:
    """Y_lm(theta, phi), Condon-Shortley convention, stable to l ~ 200."""
    if abs(m) > l:
        raise DomainError(f"|m|={abs(m)} exceeds l={l}")
    ma = abs(m)
    col = _legendre_column(l, ma, math.cos(theta))
    val = float(col[l - ma, 0])
    if m >= 0:
        return val * complex(math.cos(m * phi), math.sin(m * phi))
    # Y_{l,-m} = (-1)^m conj(Y_{lm})
    sign = (-1.0) ** ma
    return sign * val * complex(math.cos(m * phi), math.sin(m * phi))


def sph_harm_equatorial(l: int, m: int, phi: float) -> complex:
    """Y_lm(pi/2, phi); exactly 0 when l - m is odd."""
    if abs(m) > l:
        raise DomainError(f"|m|={abs(m)} exceeds l={l}")
    if (l - m) % 2 != 0:
        return 0.0 + 0.0j
    ma = abs(m)
    col = _legendre_column(l, ma, 0.0)
    val = float(col[l - ma, 0])
    if m < 0:
        val *= (-1.0) ** ma
    return val * complex(math.cos(m * phi), math.sin(m * phi))


def equatorial_ylm_matrix(lmax: int) -> np.ndarray:
    """Real prefactors Y_lm(pi/2, 0) as an array indexed [l, m + lmax].

    Entries with |m| > l are 0; so are the parity-forbidden (l-m odd)
    slots.  Used by the density renderer, which multiplies by e^{i m phi}.
    """
    out = np.zeros((lmax + 1, 2 * lmax + 1))
    for m in range(0, lmax + 1):
        col = _legendre_column(lmax, m, 0.0)[:, 0]
        ls = np.arange(m, lmax + 1)
        out[ls, m + lmax] = col
        out[ls, -m + lmax] = col * (-1.0) ** m
    return out
