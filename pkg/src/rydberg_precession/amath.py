"""Overflow-safe angular-momentum arithmetic for large quantum numbers.

Magnitudes are carried in log space or exact integers so factorial
ratios stay finite far beyond the ~170! limit of double precision.
Half-integers are stored as exact doubled integers, which keeps quantum
numbers out of floating point entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

__all__ = [
    "HalfInt",
    "LogFactorialTable",
    "CoherentCoeffVector",
    "log_factorial",
    "clebsch_gordan",
    "clebsch_gordan_sector",
    "so3_coherent_coeffs",
    "angular_momentum_expectations",
]


@dataclass(frozen=True)
class HalfInt:
    """A half-integer j or m stored as the exact integer 2j / 2m."""

    twice_value: int

    @classmethod
    def of(cls, x) -> "HalfInt":
        """Coerce an int, exact-half float or HalfInt to a HalfInt."""
        if isinstance(x, HalfInt):
            return x
        if isinstance(x, (int, np.integer)):
            return cls(2 * int(x))
        doubled = 2.0 * float(x)
        rounded = round(doubled)
        if doubled != rounded:
            raise DomainError(f"{x!r} is not a half-integer")
        return cls(int(rounded))

    @property
    def value(self) -> float:
        return self.twice_value / 2.0

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def __float__(self) -> float:
        return self.value

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice_value)

    def __add__(self, other) -> "HalfInt":
        return HalfInt(self.twice_value + HalfInt.of(other).twice_value)

    def __sub__(self, other) -> "HalfInt":
        return HalfInt(self.twice_value - HalfInt.of(other).twice_value)

    def __le__(self, other) -> bool:
        return self.twice_value <= HalfInt.of(other).twice_value

    def __lt__(self, other) -> bool:
        return self.twice_value < HalfInt.of(other).twice_value

    def __repr__(self) -> str:
        t = self.twice_value
        return str(t // 2) if t % 2 == 0 else f"{t}/2"


class LogFactorialTable:
    """Read-only table of ln(k!) built once by cumulative summation.

    values[0] = 0 and values[k] - values[k-1] = ln(k) to ulp accuracy.
    """

    def __init__(self, max_arg: int):
        if max_arg < 0:
            raise DomainError("max_arg must be non-negative")
        self.max_arg = max_arg
        values = np.zeros(max_arg + 1)
        if max_arg >= 1:
            values[1:] = np.cumsum(np.log(np.arange(1.0, max_arg + 1.0)))
        values.setflags(write=False)
        self.values = values

    def __call__(self, k: int) -> float:
        if k < 0 or k > self.max_arg:
            raise DomainError(f"log-factorial argument {k} outside [0, {self.max_arg}]")
        return float(self.values[k])


# Large enough for every supported shell (non-goal: j > 200, so 4n <= ~1650).
_TABLE = LogFactorialTable(2000)
_LF = _TABLE.values


def log_factorial(k: int) -> float:
    """ln(k!) from the shared table; raises DomainError out of range."""
    return _TABLE(int(k))


@lru_cache(maxsize=4)
def _factorials(max_arg: int) -> list[int]:
    facts = [1] * (max_arg + 1)
    for k in range(1, max_arg + 1):
        facts[k] = facts[k - 1] * k
    return facts


def _log_big(n: int) -> float:
    """ln(n) for an arbitrarily large positive integer."""
    shift = n.bit_length() - 53
    if shift <= 0:
        return math.log(n)
    return math.log(n >> shift) + shift * math.log(2.0)


def _doubled(j1, m1, j2, m2, l, m) -> tuple[int, int, int, int, int, int]:
    vals = tuple(HalfInt.of(x).twice_value for x in (j1, m1, j2, m2, l, m))
    tj1, tm1, tj2, tm2, tl, tm = vals
    for tj, tmm, name in ((tj1, tm1, "j1"), (tj2, tm2, "j2"), (tl, tm, "l")):
        if tj < 0:
            raise DomainError(f"{name} must be non-negative")
        if abs(tmm) > tj:
            raise DomainError(f"|m| exceeds {name}")
        if (tj - tmm) % 2 != 0:
            raise DomainError(f"m is not of the same integer/half-integer type as {name}")
    return vals


def clebsch_gordan(j1, m1, j2, m2, l, m) -> float:
    """Condon-Shortley Clebsch-Gordan coefficient <j1 m1 j2 m2 | l m>.

    Single-sum Racah formula with sign tracking.  The alternating sum is
    accumulated in exact integer arithmetic (floating-point compensation
    is not enough: it loses all significance near j ~ 70 on central
    arguments); magnitudes only become floats in the final log-space
    assembly.  Selection-rule violations return exactly 0.
    """
    tj1, tm1, tj2, tm2, tl, tm = _doubled(j1, m1, j2, m2, l, m)
    if tm1 + tm2 != tm:
        return 0.0
    if tl < abs(tj1 - tj2) or tl > tj1 + tj2 or (tj1 + tj2 + tl) % 2 != 0:
        return 0.0

    # Nominal-integer combinations entering the factorials.
    a = (tj1 + tj2 - tl) // 2
    b1 = (tj1 - tm1) // 2
    b2 = (tj2 + tm2) // 2
    c1 = (tl - tj2 + tm1) // 2
    c2 = (tl - tj1 - tm2) // 2
    kmin = max(0, -c1, -c2)
    kmax = min(a, b1, b2)
    if kmax < kmin:
        return 0.0

    facts = _factorials(max(2000, (tj1 + tj2 + tl) // 2 + 1))

    # term(k) = (-1)^k / [k! (a-k)! (b1-k)! (b2-k)! (c1+k)! (c2+k)!]
    # Scaled by the common denominator these are exact integers connected
    # by small rational ratios, so the sum is computed without rounding.
    t = (
        facts[kmax] // facts[kmin]
        * (facts[c1 + kmax] // facts[c1 + kmin])
        * (facts[c2 + kmax] // facts[c2 + kmin])
    )
    total = -t if kmin % 2 else t
    for k in range(kmin, kmax):
        t = t * (a - k) * (b1 - k) * (b2 - k)
        t //= (k + 1) * (c1 + k + 1) * (c2 + k + 1)
        total = total - t if (k + 1) % 2 else total + t
    if total == 0:
        return 0.0

    den_common = (
        facts[kmax] * facts[a - kmin] * facts[b1 - kmin] * facts[b2 - kmin]
        * facts[c1 + kmax] * facts[c2 + kmax]
    )
    pre_num = (
        (tl + 1)
        * facts[a]
        * facts[(tj1 - tj2 + tl) // 2]
        * facts[(-tj1 + tj2 + tl) // 2]
        * facts[(tj1 + tm1) // 2]
        * facts[b1]
        * facts[b2]
        * facts[(tj2 - tm2) // 2]
        * facts[(tl + tm) // 2]
        * facts[(tl - tm) // 2]
    )
    pre_den = facts[(tj1 + tj2 + tl) // 2 + 1]

    sign = 1.0 if total > 0 else -1.0
    log_mag = 0.5 * (_log_big(pre_num) - _log_big(pre_den)) + _log_big(abs(total)) - _log_big(den_common)
    return sign * math.exp(log_mag)


@lru_cache(maxsize=None)
def clebsch_gordan_sector(tj1: int, tj2: int, tm: int):
    """All coefficients <j1 m1 j2 (m-m1) | l m> for one fixed m = m1 + m2.

    Arguments are doubled integers.  Returns (tl_values, tm1_values, U)
    with U[l_index, m1_index]; U is orthogonal because its rows are the
    eigenvectors of the total-J^2 operator restricted to the sector, a
    symmetric tridiagonal matrix with known spectrum l(l+1).  Each row's
    sign and scale are anchored to the exact Racah value at the row's
    largest component, so the matrix agrees with clebsch_gordan() while
    keeping machine-precision orthogonality at any j.  Cached per sector.
    """
    if tj1 < 0 or tj2 < 0 or abs(tm) > tj1 + tj2 or (tj1 + tj2 - tm) % 2 != 0:
        raise DomainError("invalid sector")
    tl_vals = np.arange(max(abs(tm), abs(tj1 - tj2)), tj1 + tj2 + 1, 2)
    tm1_vals = np.arange(max(-tj1, tm - tj2), min(tj1, tm + tj2) + 1, 2)
    size = len(tm1_vals)

    j1 = tj1 / 2.0
    j2 = tj2 / 2.0
    m1 = tm1_vals / 2.0
    m2 = (tm - tm1_vals) / 2.0
    tri = np.zeros((size, size))
    diag = j1 * (j1 + 1.0) + j2 * (j2 + 1.0) + 2.0 * m1 * m2
    tri[np.arange(size), np.arange(size)] = diag
    if size > 1:
        off = np.sqrt((j1 - m1[:-1]) * (j1 + m1[:-1] + 1.0)) * np.sqrt(
            (j2 + m2[:-1]) * (j2 - m2[:-1] + 1.0)
        )
        idx = np.arange(size - 1)
        tri[idx, idx + 1] = off
        tri[idx + 1, idx] = off

    eigvals, eigvecs = np.linalg.eigh(tri)
    lv = tl_vals / 2.0
    if np.abs(eigvals - lv * (lv + 1.0)).max() > 1e-6 * max(1.0, diag.max()):
        raise RuntimeError("sector eigenvalues do not match l(l+1) ladder")

    u = eigvecs.T.copy()
    for row, tl in enumerate(tl_vals):
        imax = int(np.argmax(np.abs(u[row])))
        anchor = clebsch_gordan(
            HalfInt(tj1), HalfInt(int(tm1_vals[imax])),
            HalfInt(tj2), HalfInt(int(tm - tm1_vals[imax])),
            HalfInt(int(tl)), HalfInt(tm),
        )
        if abs(abs(anchor) - abs(u[row, imax])) > 1e-10:
            raise RuntimeError("sector eigenvector disagrees with Racah anchor")
        if anchor * u[row, imax] < 0.0:
            u[row] = -u[row]
    u.setflags(write=False)
    return tl_vals, tm1_vals, u


@dataclass(frozen=True)
class CoherentCoeffVector:
    """SO(3) coherent-state amplitudes over m = -j..j for one spin j."""

    j: HalfInt
    zeta: complex
    coeffs: np.ndarray  # complex, index i <-> m = -j + i

    def expectations(self) -> np.ndarray:
        return angular_momentum_expectations(self.j, self.coeffs)


def so3_coherent_coeffs(j, zeta: complex) -> CoherentCoeffVector:
    """Spin-coherent amplitudes c_m = sqrt(C(2j, j+m)) zeta^(j+m) / (1+|zeta|^2)^j.

    The binomial square root and the power of zeta are assembled in log
    magnitude with the phase accumulated separately, then renormalized,
    so arbitrarily large j and |zeta| stay finite.
    """
    j = HalfInt.of(j)
    if j.twice_value < 0:
        raise DomainError("j must be non-negative")
    zeta = complex(zeta)
    tj = j.twice_value
    dim = tj + 1
    coeffs = np.zeros(dim, dtype=complex)
    if zeta == 0.0:
        coeffs[0] = 1.0
    else:
        k = np.arange(dim)  # k = j + m
        log_mag = (
            0.5 * (_LF[tj] - _LF[k] - _LF[tj - k])
            + k * math.log(abs(zeta))
            - 0.5 * tj * math.log1p(abs(zeta) ** 2)
        )
        phase = k * np.angle(zeta)
        coeffs = np.exp(log_mag) * np.exp(1j * phase)
    coeffs = coeffs / math.sqrt(float(np.sum(np.abs(coeffs) ** 2)))
    coeffs.setflags(write=False)
    return CoherentCoeffVector(j=j, zeta=zeta, coeffs=coeffs)


def angular_momentum_expectations(j, coeffs: np.ndarray) -> np.ndarray:
    """(<J1>, <J2>, <J3>) for amplitudes indexed by m = -j..j."""
    tj = HalfInt.of(j).twice_value
    if len(coeffs) != tj + 1:
        raise DomainError("coefficient vector length does not match j")
    m = np.arange(tj + 1) - tj / 2.0
    jz = float(np.sum(m * np.abs(coeffs) ** 2))
    # <J+> couples m to m+1 with sqrt((j-m)(j+m+1)).
    jv = tj / 2.0
    ladder = np.sqrt((jv - m[:-1]) * (jv + m[:-1] + 1.0))
    jplus = complex(np.sum(np.conj(coeffs[1:]) * coeffs[:-1] * ladder))
    return np.array([jplus.real, jplus.imag, jz])
