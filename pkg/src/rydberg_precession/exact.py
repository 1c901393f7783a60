"""Brute-force small-system constructions used as independent oracles.

Nothing here shares an algorithm with the production paths: coupled
states are built by ladder-operator lowering plus Gram-Schmidt, the
coherent coefficients come from exact binomials, evolution is a dense
matrix sandwich, and observables are dense operator matrices.  Intended
for j up to ~10 / n up to ~21, where O(n^4) cost is irrelevant.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .hydrogenic import DEFAULT_CONSTANTS, PhysicalConstants, ShellSpec

__all__ = ["ladder_cg_table", "dense_evolution_oracle"]


def ladder_cg_table(j1: float, j2: float) -> dict[tuple[float, float, float, float], float]:
    """All <j1 m1 j2 m2 | l m> by lowering from stretched tops + Gram-Schmidt.

    Returns {(m1, m2, l, m): coefficient} with the Condon-Shortley sign
    convention (the m1 = j1 component of every |l, l> is positive).
    Independent ground truth for the Racah-sum path; meant for j <= ~6.
    """
    tj1, tj2 = round(2 * j1), round(2 * j2)
    if tj1 < 0 or tj2 < 0:
        raise DomainError("j must be non-negative")
    d1, d2 = tj1 + 1, tj2 + 1
    m1s = (np.arange(d1) - tj1 / 2.0)
    m2s = (np.arange(d2) - tj2 / 2.0)

    def lower(vec: np.ndarray) -> np.ndarray:
        out = np.zeros_like(vec)
        # J- = J1- + J2-;  J-|j m> = sqrt((j+m)(j-m+1)) |j m-1>
        c1 = np.sqrt((j1 + m1s) * (j1 - m1s + 1.0))
        c2 = np.sqrt((j2 + m2s) * (j2 - m2s + 1.0))
        out[:-1, :] += c1[1:, None] * vec[1:, :]
        out[:, :-1] += c2[None, 1:] * vec[:, 1:]
        return out

    towers: dict[float, np.ndarray] = {}  # l -> current |l, m> vector
    table: dict[tuple[float, float, float, float], float] = {}
    l_top = (tj1 + tj2) / 2.0
    l_min = abs(tj1 - tj2) / 2.0

    tm = tj1 + tj2
    while tm >= -(tj1 + tj2):
        m = tm / 2.0
        # Lower every existing tower into this sector.
        for l, vec in list(towers.items()):
            towers[l] = lower(vec) / math.sqrt((l + m + 1.0) * (l - m))
        # A new tower |l m> with l = m starts while m >= l_min.
        if m >= l_min and (tm - (tj1 + tj2)) % 2 == 0 and m <= l_top:
            if m == l_top:
                seed = np.zeros((d1, d2))
                seed[-1, -1] = 1.0
                towers[l_top] = seed
            else:
                # Orthonormal complement of the lowered towers in the sector.
                sector = [(i1, i2) for i1 in range(d1) for i2 in range(d2)
                          if abs(m1s[i1] + m2s[i2] - m) < 1e-9]
                basis = np.array([towers[l].flatten() for l in towers])
                best = None
                for i1, i2 in sector:
                    seed = np.zeros(d1 * d2)
                    seed[i1 * d2 + i2] = 1.0
                    resid = seed - basis.T @ (basis @ seed)
                    if best is None or np.linalg.norm(resid) > np.linalg.norm(best):
                        best = resid
                best = best - basis.T @ (basis @ best)  # second pass for stability
                best /= np.linalg.norm(best)
                vec = best.reshape(d1, d2)
                # Condon-Shortley: component at the largest m1 is positive.
                i1_top = max(i1 for i1, i2 in sector)
                i2_top = next(i2 for i1, i2 in sector if i1 == i1_top)
                if vec[i1_top, i2_top] < 0.0:
                    vec = -vec
                towers[m] = vec
        for l, vec in towers.items():
            nz1, nz2 = np.nonzero(np.abs(vec) > 0.0)
            for i1, i2 in zip(nz1, nz2):
                table[(float(m1s[i1]), float(m2s[i2]), float(l), m)] = float(vec[i1, i2])
        tm -= 2
        towers = {l: v for l, v in towers.items() if l >= abs(tm) / 2.0}
    return table


def _dense_cg_matrix(n: int) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """Full (l,m) x (m1,m2) transform from the ladder table (no truncation)."""
    j = (n - 1) / 2.0
    table = ladder_cg_table(j, j)
    coupled_labels = [(l, m) for l in range(n) for m in range(-l, l + 1)]
    index = {lab: i for i, lab in enumerate(coupled_labels)}
    v = np.zeros((n * n, n * n))
    for (m1, m2, l, m), coeff in table.items():
        row = index[(int(round(l)), int(round(m)))]
        col = int(round(m1 + j)) * n + int(round(m2 + j))
        v[row, col] = coeff
    return v, coupled_labels


def dense_evolution_oracle(shell: ShellSpec, zeta1: complex, zeta2: complex,
                           t_seconds: float,
                           constants: PhysicalConstants = DEFAULT_CONSTANTS) -> dict:
    """Evolve an untruncated coherent state with dense matrices and measure it.

    Builds the coherent amplitudes from exact binomials, conjugates the
    diagonal first-order phases with the full ladder-derived CG matrix,
    and takes expectation values against dense M/N operator matrices.
    Returns a dict of observables comparable to coherent.observables().
    """
    n = shell.n
    j = (n - 1) / 2.0
    tj = n - 1

    def coeffs(zeta: complex) -> np.ndarray:
        out = np.zeros(n, dtype=complex)
        if zeta == 0.0:
            out[0] = 1.0
            return out
        for k in range(n):  # k = j + m
            out[k] = math.sqrt(math.comb(tj, k)) * zeta**k
        out /= (1.0 + abs(zeta) ** 2) ** (tj / 2.0)
        return out

    psi = np.outer(coeffs(zeta1), coeffs(zeta2)).flatten()
    psi /= np.linalg.norm(psi)

    v, coupled_labels = _dense_cg_matrix(n)
    t_au = t_seconds / constants.atomic_time_si
    alpha2 = constants.alpha**2
    # reference l from <L3> of the product state
    m1_grid = np.repeat(np.arange(n) - j, n)
    m2_grid = np.tile(np.arange(n) - j, n)
    l3 = float(np.sum((m1_grid + m2_grid) * np.abs(psi) ** 2))
    l_ref = max(0, min(n - 1, round(abs(l3))))

    def e1(l: int) -> float:
        return -(shell.Z**4 * alpha2 / (2.0 * n**3)) * (1.0 / (l + 0.5) - 3.0 / (4.0 * n))

    phases = np.array([
        math.fmod((e1(l) - e1(l_ref)) * t_au, 2.0 * math.pi) for l, _ in coupled_labels
    ])
    u = v.T @ (np.exp(-1j * phases)[:, None] * v)
    psi_t = u @ psi

    # Dense single-factor operators on the product grid.
    mvals = np.arange(n) - j
    jz1 = np.diag(mvals)
    jp1 = np.zeros((n, n))
    jp1[np.arange(1, n), np.arange(n - 1)] = np.sqrt((j - mvals[:-1]) * (j + mvals[:-1] + 1.0))
    eye = np.eye(n)
    m3 = np.kron(jz1, eye)
    n3 = np.kron(eye, jz1)
    mp = np.kron(jp1, eye)
    npl = np.kron(eye, jp1)

    def ev(op: np.ndarray) -> complex:
        return complex(np.vdot(psi_t, op @ psi_t))

    m_plus = ev(mp)
    n_plus = ev(npl)
    m_vec = np.array([m_plus.real, m_plus.imag, ev(m3).real])
    n_vec = np.array([n_plus.real, n_plus.imag, ev(n3).real])
    l3op = m3 + n3
    mdotn_op = m3 @ n3 + 0.5 * (mp @ npl.T.conj() + mp.T.conj() @ npl)
    l2 = 2.0 * j * (j + 1.0) + 2.0 * ev(mdotn_op).real
    return {
        "L_vec": m_vec + n_vec,
        "A_vec": m_vec - n_vec,
        "L2": l2,
        "l_var": ev(l3op @ l3op).real - ev(l3op).real ** 2,
        "norm": float(np.linalg.norm(psi_t)),
    }
