"""SO(4) coherent states in a hydrogenic shell and their observables.

States are built in the product basis |j m1>|j m2> of the two commuting
SO(3) factors (M = (L+A)/2, N = (L-A)/2), mapped to the coupled
hydrogenic labels (l, m) by Clebsch-Gordan sectors, and measured by
exact ladder-operator sums.  The planar canonical family zeta2 = -zeta1
with zeta1 = eta real puts <L> on z and <A> on x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .amath import clebsch_gordan_sector, so3_coherent_coeffs
from .errors import ContractError, DomainError
from .hydrogenic import ShellSpec

__all__ = [
    "CoherentParams",
    "ProductState",
    "CoupledState",
    "ObservableReport",
    "build_product_state",
    "to_coupled",
    "to_product",
    "observables",
    "effective_l",
    "eccentricity_of_eta",
    "l3_of_eta",
    "a1_of_eta",
    "l2_of_eta",
    "l_variance_closed_form",
    "dephasing_phi_eta",
    "dephasing_phi_eps",
    "eta_of_eps",
]

NORM_TOL = 1e-8


@dataclass(frozen=True)
class CoherentParams:
    """Coherent-state parameters (zeta1 for the M factor, zeta2 for N)."""

    shell: ShellSpec
    zeta1: complex
    zeta2: complex

    @classmethod
    def planar(cls, shell: ShellSpec, eta: float) -> "CoherentParams":
        """Canonical family: zeta2 = -zeta1 = -eta with eta real >= 0.

        Puts <L> along z and <A> along +x; eta parameterizes the orbit
        eccentricity as eps = 2 eta / (1 + eta^2).
        """
        if eta < 0.0:
            raise DomainError("eta must be non-negative")
        return cls(shell=shell, zeta1=complex(eta), zeta2=complex(-eta))

    @property
    def eta(self) -> float | None:
        """eta of the canonical family, or None for a general pair."""
        if self.zeta2 == -self.zeta1 and self.zeta1.imag == 0.0 and self.zeta1.real >= 0.0:
            return self.zeta1.real
        return None


@dataclass
class ProductState:
    """Amplitudes over the (m1, m2) eigenbasis of M3, N3.

    amps[i1, i2] belongs to m1 = i1 - j, m2 = i2 - j (dense n x n array).
    """

    shell: ShellSpec
    amps: np.ndarray

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


@dataclass
class CoupledState:
    """Amplitudes over hydrogenic (l, m) labels within the shell.

    amps[l, m + (n-1)] is dense per l so evolution can phase whole rows.
    """

    shell: ShellSpec
    amps: np.ndarray

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


def build_product_state(params: CoherentParams, truncation: float = 1e-12) -> ProductState:
    """Outer product of the two SO(3) coherent coefficient vectors.

    Amplitudes below truncation * max|amp| are dropped and the state is
    renormalized; the coefficients are sharply peaked (binomial, width
    ~sqrt(j)), so almost all of the n^2 grid is negligible at large n.
    """
    if not (0.0 <= truncation < 1e-6):
        raise DomainError("truncation must be in [0, 1e-6)")
    shell = params.shell
    c1 = so3_coherent_coeffs(shell.j, params.zeta1).coeffs
    c2 = so3_coherent_coeffs(shell.j, params.zeta2).coeffs
    amps = np.outer(c1, c2)
    if truncation > 0.0:
        cut = truncation * np.abs(amps).max()
        amps[np.abs(amps) < cut] = 0.0
    amps /= math.sqrt(float(np.sum(np.abs(amps) ** 2)))
    return ProductState(shell=shell, amps=amps)


def _sector_support(amps: np.ndarray) -> np.ndarray:
    """Indices s = i1 + i2 of anti-diagonals carrying any amplitude."""
    n = amps.shape[0]
    flipped = amps[:, ::-1]
    support = []
    for s in range(2 * n - 1):
        if np.any(flipped.diagonal(offset=n - 1 - s) != 0.0):
            support.append(s)
    return np.asarray(support, dtype=int)


def to_coupled(state: ProductState) -> CoupledState:
    """Clebsch-Gordan transform (m1, m2) -> (l, m); unitary per m sector."""
    n = state.shell.n
    tj = n - 1
    amps = state.amps
    out = np.zeros((n, 2 * n - 1), dtype=complex)
    for s in _sector_support(amps):
        tm = 2 * s - 2 * tj
        tl_vals, tm1_vals, u = clebsch_gordan_sector(tj, tj, tm)
        i1 = (tm1_vals + tj) // 2
        vec = amps[i1, s - i1]
        block = u @ vec
        out[tl_vals // 2, s] = block
    return CoupledState(shell=state.shell, amps=out)


def to_product(state: CoupledState) -> ProductState:
    """Adjoint sector transform (l, m) -> (m1, m2)."""
    n = state.shell.n
    tj = n - 1
    amps = state.amps
    out = np.zeros((n, n), dtype=complex)
    for s in range(2 * n - 1):
        col = amps[:, s]
        nz = np.nonzero(col)[0]
        if len(nz) == 0:
            continue
        tm = 2 * s - 2 * tj
        tl_vals, tm1_vals, u = clebsch_gordan_sector(tj, tj, tm)
        vec = u.T @ col[tl_vals // 2]
        i1 = (tm1_vals + tj) // 2
        out[i1, s - i1] = vec
    return ProductState(shell=state.shell, amps=out)


@dataclass(frozen=True)
class ObservableReport:
    """Algebraic observables of a shell state (hbar units)."""

    L_vec: np.ndarray  # <L>, 3-vector
    A_vec: np.ndarray  # <A> (scaled Laplace-Runge-Lenz), 3-vector
    L2: float  # <L^2>
    l_var: float  # (Delta L3)^2
    C1: float  # <L^2 + A^2>
    C2: float  # <L . A>
    eccentricity: float

    def as_dict(self) -> dict:
        return {
            "L_vec": [float(v) for v in self.L_vec],
            "A_vec": [float(v) for v in self.A_vec],
            "L2": self.L2,
            "l_var": self.l_var,
            "C1": self.C1,
            "C2": self.C2,
            "eccentricity": self.eccentricity,
        }


def _factor_expectations(amps: np.ndarray, jv: float):
    """(<J3>, <J+>, <J3^2>) for the first index plus the M.N pieces."""
    n = amps.shape[0]
    m = np.arange(n) - jv
    prob = np.abs(amps) ** 2

    m1_marginal = prob.sum(axis=1)
    m2_marginal = prob.sum(axis=0)
    m1_mean = float(m1_marginal @ m)
    m2_mean = float(m2_marginal @ m)

    ladder = np.sqrt((jv - m[:-1]) * (jv + m[:-1] + 1.0))
    mplus = complex(np.sum(np.conj(amps[1:, :]) * amps[:-1, :] * ladder[:, None]))
    nplus = complex(np.sum(np.conj(amps[:, 1:]) * amps[:, :-1] * ladder[None, :]))

    m3n3 = float(np.einsum("ij,i,j->", prob, m, m))
    # <M+ N->: raises m1, lowers m2.
    mp_nm = complex(
        np.sum(
            np.conj(amps[1:, :-1]) * amps[:-1, 1:]
            * ladder[:, None] * ladder[None, :]
        )
    )
    l3_sq = float(np.einsum("ij,i,j->", prob, m**2, np.ones_like(m))
                  + 2.0 * m3n3
                  + np.einsum("ij,i,j->", prob, np.ones_like(m), m**2))
    # <J^2> per factor via J3^2 + (J+J- + J-J+)/2, summed numerically.
    j2_weight = m**2 + ((jv + m) * (jv - m + 1.0) + (jv - m) * (jv + m + 1.0)) / 2.0
    m_sq = float(np.einsum("ij,i->", prob, j2_weight))
    n_sq = float(np.einsum("ij,j->", prob, j2_weight))
    return m1_mean, m2_mean, mplus, nplus, m3n3, mp_nm, l3_sq, m_sq, n_sq


def observables(state: ProductState) -> ObservableReport:
    """Exact ladder-operator expectation values in the product basis.

    L = M + N and A = M - N; <M.N> uses the full operator sum
    (M3 N3 + (M+ N- + M- N+)/2), valid for any shell state, so evolved
    non-product states are measured exactly too.
    """
    norm2 = state.norm_squared()
    if abs(norm2 - 1.0) > NORM_TOL:
        raise ContractError(f"state norm^2 = {norm2} is not 1 within {NORM_TOL}")
    shell = state.shell
    jv = (shell.n - 1) / 2.0

    (m1_mean, m2_mean, mplus, nplus, m3n3, mp_nm, l3_sq,
     m_sq, n_sq) = _factor_expectations(state.amps, jv)

    m_vec = np.array([mplus.real, mplus.imag, m1_mean])
    n_vec = np.array([nplus.real, nplus.imag, m2_mean])
    l_vec = m_vec + n_vec
    a_vec = m_vec - n_vec

    mdotn = m3n3 + mp_nm.real
    l2 = m_sq + n_sq + 2.0 * mdotn
    a2 = m_sq + n_sq - 2.0 * mdotn
    l_var = l3_sq - l_vec[2] ** 2

    ecc = float(np.linalg.norm(a_vec)) / (shell.n - 1) if shell.n > 1 else 0.0
    return ObservableReport(
        L_vec=l_vec,
        A_vec=a_vec,
        L2=l2,
        l_var=l_var,
        C1=l2 + a2,
        C2=m_sq - n_sq,  # <L.A> reduces to the factor-Casimir difference
        eccentricity=min(ecc, 1.0),
    )


def effective_l(report: ObservableReport, mode: str = "l3") -> float:
    """Effective (l + 1/2) entering T_p, extracted from a state's observables.

    Modes: "l3" (default) |<L3>|, which reproduces the large-n reference
    periods; "l3_plus_half" adds the remaining 1/2; "sqrt_l2" uses
    sqrt(<L^2>).  The choices differ at O(1/n).
    """
    if mode == "l3":
        return abs(float(report.L_vec[2]))
    if mode == "l3_plus_half":
        return abs(float(report.L_vec[2])) + 0.5
    if mode == "sqrt_l2":
        return math.sqrt(max(report.L2, 0.0))
    raise DomainError(f"unknown l_eff mode {mode!r}")


# ---------------------------------------------------------------------------
# Closed forms of the planar canonical family
# ---------------------------------------------------------------------------

def eccentricity_of_eta(eta: float) -> float:
    """Orbit eccentricity eps = 2 eta / (1 + eta^2)."""
    if eta < 0.0:
        raise DomainError("eta must be non-negative")
    return 2.0 * eta / (1.0 + eta * eta)


def eta_of_eps(eps: float, branch: str = "lower") -> float:
    """Invert eps = 2 eta/(1+eta^2); "lower" gives eta < 1, "upper" eta > 1."""
    if not 0.0 <= eps < 1.0:
        raise DomainError("eps must be in [0, 1)")
    if eps == 0.0:
        return 0.0 if branch == "lower" else math.inf
    root = math.sqrt(1.0 - eps * eps)
    return (1.0 - root) / eps if branch == "lower" else (1.0 + root) / eps


def l3_of_eta(j: float, eta: float) -> float:
    """<L3> = 2j (eta^2 - 1)/(1 + eta^2)."""
    return 2.0 * j * (eta * eta - 1.0) / (1.0 + eta * eta)


def a1_of_eta(j: float, eta: float) -> float:
    """<A1> = 4 j eta / (1 + eta^2)."""
    return 4.0 * j * eta / (1.0 + eta * eta)


def l2_of_eta(j: float, eta: float) -> float:
    """<L^2> = 2j(j+1) + 2 j^2 (eta^4 - 6 eta^2 + 1)/(1 + eta^2)^2."""
    e2 = eta * eta
    return 2.0 * j * (j + 1.0) + 2.0 * j * j * (e2 * e2 - 6.0 * e2 + 1.0) / (1.0 + e2) ** 2


def l_variance_closed_form(j, eta: float) -> float:
    """(Delta L3)^2 of the canonical state: twice the single-factor 2j eta^2/(1+eta^2)^2."""
    if eta < 0.0:
        raise DomainError("eta must be non-negative")
    jv = float(j.value) if hasattr(j, "value") else float(j)
    single = 2.0 * jv * eta * eta / (1.0 + eta * eta) ** 2
    return 2.0 * single


def dephasing_phi_eta(eta: float) -> float:
    """Signed dephasing test phase 2 pi eta^2 / (eta^4 - 1).

    Diverges at eta = 1 (degenerate linear orbit), which is refused.
    """
    if eta < 0.0:
        raise DomainError("eta must be non-negative")
    if eta == 1.0:
        raise DomainError("eta = 1 is the degenerate linear orbit; dephasing diverges")
    return 2.0 * math.pi * eta * eta / (eta**4 - 1.0)


def dephasing_phi_eps(eps: float, branch: str = "lower") -> float:
    """Dephasing test phase as a function of eccentricity, per branch.

    2 pi eps^2 (2 - eps^2 +- 2 sqrt(1-eps^2)) /
    (8 - 8 eps^2 +- 4 (2-eps^2) sqrt(1-eps^2)),
    "+" on the upper (eta > 1) branch, "-" on the lower; equals
    (pi/2) eps^2 + O(eps^4) in magnitude near circular.
    """
    if not 0.0 <= eps < 1.0:
        raise DomainError("eps must be in [0, 1)")
    if branch not in ("lower", "upper"):
        raise DomainError(f"unknown branch {branch!r}")
    if eps == 0.0:
        return 0.0
    sign = 1.0 if branch == "upper" else -1.0
    root = math.sqrt(1.0 - eps * eps)
    num = 2.0 * math.pi * eps * eps * (2.0 - eps * eps + sign * 2.0 * root)
    den = 8.0 - 8.0 * eps * eps + sign * 4.0 * (2.0 - eps * eps) * root
    return num / den
