"""Exact angular-momentum algebra.

Wigner 3j symbols (Racah closed form, log-factorial evaluation, memoized),
Wigner rotation matrices in the z-y-z convention
D(j)_{m',m}(a,b,g) = exp(-i m' a) d(j)_{m',m}(b) exp(-i m g),
dipole Gaunt integrals, associated Legendre polynomials and complex
spherical harmonics.  Condon-Shortley phases throughout.

Only integer angular momenta are supported; every coupling in the model is
integer spin.  The memo cache allows concurrent readers; insertion is
serialized on a lock.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.special import lpmv

from .errors import ValidationError

__all__ = [
    "AngularMomentum",
    "ThreeJKey",
    "EulerAngles",
    "wigner_3j",
    "wigner_3j_exact",
    "gaunt_S",
    "wigner_d_small",
    "wigner_D",
    "assoc_legendre",
    "legendre_P",
    "sph_harm",
    "real_to_complex_coeffs",
    "REAL_HARMONIC_LABELS",
]


@dataclass(frozen=True)
class AngularMomentum:
    """A non-negative integer angular momentum."""

    j: int

    def __post_init__(self):
        if not isinstance(self.j, (int, np.integer)) or self.j < 0:
            raise ValidationError(f"angular momentum must be a non-negative integer, got {self.j!r}")

    def magnetic_range(self) -> range:
        return range(-self.j, self.j + 1)


class ThreeJKey(NamedTuple):
    j1: int
    j2: int
    j3: int
    m1: int
    m2: int
    m3: int


class EulerAngles(NamedTuple):
    """z-y-z Euler angles; the orientation measure is da d(cos b) dg / 8 pi^2."""

    alpha: float
    beta: float
    gamma: float


_LOG_FACT = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, 64)))))


def _lf(n: int) -> float:
    return _LOG_FACT[n]


_3j_cache: dict[tuple[int, int, int, int, int, int], float] = {}
_3j_lock = threading.Lock()


def _wigner_3j_compute(j1, j2, j3, m1, m2, m3) -> float:
    # Racah closed form with log-factorials; adequate for j <= 12.
    t_min = max(0, j2 - j3 - m1, j1 - j3 + m2)
    t_max = min(j1 + j2 - j3, j1 - m1, j2 + m2)
    if t_min > t_max:
        return 0.0
    log_pre = 0.5 * (
        _lf(j1 + j2 - j3) + _lf(j1 - j2 + j3) + _lf(-j1 + j2 + j3) - _lf(j1 + j2 + j3 + 1)
        + _lf(j1 + m1) + _lf(j1 - m1) + _lf(j2 + m2) + _lf(j2 - m2) + _lf(j3 + m3) + _lf(j3 - m3)
    )
    total = 0.0
    for t in range(t_min, t_max + 1):
        log_den = (
            _lf(t) + _lf(j3 - j2 + t + m1) + _lf(j3 - j1 + t - m2)
            + _lf(j1 + j2 - j3 - t) + _lf(j1 - t - m1) + _lf(j2 - t + m2)
        )
        total += (-1.0) ** t * math.exp(log_pre - log_den)
    return (-1.0) ** (j1 - j2 - m3) * total


def wigner_3j(j1: int, j2: int, j3: int, m1: int, m2: int, m3: int) -> float:
    """Wigner 3j symbol for integer arguments.

    Selection-rule violations (including |m_i| > j_i) return 0 rather than
    raising; only negative j is rejected as invalid input.
    """
    if j1 < 0 or j2 < 0 or j3 < 0:
        raise ValidationError(f"negative angular momentum in 3j symbol ({j1}, {j2}, {j3})")
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3:
        return 0.0
    if m1 + m2 + m3 != 0 or not (abs(j1 - j2) <= j3 <= j1 + j2):
        return 0.0
    key = (j1, j2, j3, m1, m2, m3)
    val = _3j_cache.get(key)
    if val is None:
        val = _wigner_3j_compute(*key)
        with _3j_lock:
            _3j_cache[key] = val
    return val


def wigner_3j_exact(j1: int, j2: int, j3: int, m1: int, m2: int, m3: int) -> float:
    """Slow exact-rational evaluation (oracle path).

    All arithmetic is exact rational; the only rounding is the final
    square root, so the result is correct to ~1 ulp for any j.
    """
    if m1 + m2 + m3 != 0 or not (abs(j1 - j2) <= j3 <= j1 + j2):
        return 0.0
    t_min = max(0, j2 - j3 - m1, j1 - j3 + m2)
    t_max = min(j1 + j2 - j3, j1 - m1, j2 + m2)
    if t_min > t_max:
        return 0.0
    f = math.factorial
    pre2 = Fraction(
        f(j1 + j2 - j3) * f(j1 - j2 + j3) * f(-j1 + j2 + j3)
        * f(j1 + m1) * f(j1 - m1) * f(j2 + m2) * f(j2 - m2) * f(j3 + m3) * f(j3 - m3),
        f(j1 + j2 + j3 + 1),
    )
    s = Fraction(0)
    for t in range(t_min, t_max + 1):
        den = (
            f(t) * f(j3 - j2 + t + m1) * f(j3 - j1 + t - m2)
            * f(j1 + j2 - j3 - t) * f(j1 - t - m1) * f(j2 - t + m2)
        )
        s += Fraction((-1) ** t, den)
    sign = (-1) ** (j1 - j2 - m3) * (1 if s >= 0 else -1)
    return sign * math.sqrt(float(s * s * pre2))


def gaunt_S(l: int, m: int, q: int, lo: int, mo: int) -> float:
    """Dipole Gaunt integral of Y*_{l,m} Y_{1,q} Y_{lo,mo} over the sphere.

    Vanishes unless l + 1 + lo is even, m = mo + q and |lo-1| <= l <= lo+1.
    """
    if q not in (-1, 0, 1):
        raise ValidationError(f"dipole spherical component q must be in {{-1,0,1}}, got {q}")
    if abs(m) > l or abs(mo) > lo:
        raise ValidationError("magnetic index out of range in gaunt_S")
    b = math.sqrt(3.0 * (2 * l + 1) * (2 * lo + 1) / (4.0 * np.pi))
    return ((-1.0) ** (-m)) * b * wigner_3j(l, 1, lo, 0, 0, 0) * wigner_3j(l, 1, lo, -m, q, mo)


def wigner_d_small(j: int, mprime: int, m: int, beta) -> np.ndarray | float:
    """Small Wigner d(j)_{m',m}(beta) from the standard factorial sum.

    Accepts scalar or array beta.
    """
    if abs(mprime) > j or abs(m) > j:
        raise ValidationError(f"|m'|,|m| must be <= j in wigner_d_small (j={j})")
    beta = np.asarray(beta, dtype=float)
    c = np.cos(beta / 2.0)
    s = np.sin(beta / 2.0)
    pre = 0.5 * (_lf(j + mprime) + _lf(j - mprime) + _lf(j + m) + _lf(j - m))
    total = np.zeros_like(beta)
    k_min = max(0, m - mprime)
    k_max = min(j + m, j - mprime)
    for k in range(k_min, k_max + 1):
        log_den = _lf(j + m - k) + _lf(k) + _lf(mprime - m + k) + _lf(j - mprime - k)
        coeff = (-1.0) ** (mprime - m + k) * math.exp(pre - log_den)
        total = total + coeff * c ** (2 * j + m - mprime - 2 * k) * s ** (mprime - m + 2 * k)
    return total if total.shape else float(total)


def wigner_D(j: int, mprime: int, m: int, omega: EulerAngles) -> complex:
    """Wigner rotation matrix element D(j)_{m',m}(alpha, beta, gamma)."""
    a, b, g = omega
    return np.exp(-1j * mprime * a) * wigner_d_small(j, mprime, m, b) * np.exp(-1j * m * g)


def assoc_legendre(L: int, mu: int, x) -> np.ndarray | float:
    """Associated Legendre P^mu_L(x) including the Condon-Shortley phase.

    P^1_1(0) = -1 under this convention.  Negative mu follows the standard
    reflection rule.
    """
    if L < 0 or abs(mu) > L:
        raise ValidationError(f"require 0 <= |mu| <= L, got L={L}, mu={mu}")
    if mu >= 0:
        return lpmv(mu, L, x)
    ratio = math.exp(_lf(L - abs(mu)) - _lf(L + abs(mu)))
    return (-1.0) ** abs(mu) * ratio * lpmv(abs(mu), L, x)


def legendre_P(L: int, x) -> np.ndarray | float:
    return lpmv(0, L, x)


def sph_harm(l: int, m: int, theta, phi) -> np.ndarray | complex:
    """Complex spherical harmonic Y^l_m(theta, phi), Condon-Shortley phase.

    theta is the polar angle.  Y^1_1 = -sqrt(3/8pi) sin(theta) e^{i phi}.
    """
    norm = math.sqrt((2 * l + 1) / (4.0 * np.pi) * math.exp(_lf(l - m) - _lf(l + m)))
    return norm * assoc_legendre(l, m, np.cos(theta)) * np.exp(1j * m * np.asarray(phi))


# Naming table for the real spherical harmonics used in excited-state data
# files: label -> (l, m_real, sign), where sign relates the tabulated
# Cartesian polynomial to the standard normalized real harmonic ("a"/"b"
# suffixes do not map uniformly onto +|m|/-|m|, and F3b carries a sign).
REAL_HARMONIC_LABELS: dict[str, tuple[int, int, float]] = {
    "S0": (0, 0, 1.0),
    "PZ": (1, 0, 1.0),
    "PY": (1, -1, 1.0),
    "PX": (1, 1, 1.0),
    "D0": (2, 0, 1.0),
    "D1a": (2, 1, 1.0),
    "D1b": (2, -1, 1.0),
    "D2a": (2, -2, 1.0),
    "D2b": (2, 2, 1.0),
    "F0": (3, 0, 1.0),
    "F1a": (3, 1, 1.0),
    "F1b": (3, -1, 1.0),
    "F2a": (3, -2, 1.0),
    "F2b": (3, 2, 1.0),
    "F3a": (3, 3, 1.0),
    "F3b": (3, -3, -1.0),
}


def real_to_complex_coeffs(real_coeffs: dict[str, float]) -> dict[tuple[int, int], complex]:
    """Convert real-harmonic expansion coefficients to complex-harmonic ones.

    Input keys follow the naming table (S0, PZ, ..., F3b); values are real
    coefficients on the corresponding normalized real harmonics.  The
    standard unitary map with Condon-Shortley phases is used, so the total
    norm sum(|a|^2) is preserved:

        a_{l,m}  = (-1)^m (a~_{l,m} - i a~_{l,-m}) / sqrt(2)   (m > 0)
        a_{l,-m} =        (a~_{l,m} + i a~_{l,-m}) / sqrt(2)   (m > 0)
        a_{l,0}  = a~_{l,0}
    """
    tilde: dict[tuple[int, int], float] = {}
    for label, value in real_coeffs.items():
        if label not in REAL_HARMONIC_LABELS:
            raise ValidationError(f"unknown real-harmonic label {label!r}")
        l, mr, sign = REAL_HARMONIC_LABELS[label]
        tilde[(l, mr)] = tilde.get((l, mr), 0.0) + sign * float(value)
    out: dict[tuple[int, int], complex] = {}
    for (l, mr), v in tilde.items():
        if mr == 0:
            out[(l, 0)] = out.get((l, 0), 0.0) + v
        elif mr > 0:
            out[(l, mr)] = out.get((l, mr), 0.0) + (-1.0) ** mr * v / math.sqrt(2.0)
            out[(l, -mr)] = out.get((l, -mr), 0.0) + v / math.sqrt(2.0)
        else:
            mm = -mr
            out[(l, mm)] = out.get((l, mm), 0.0) + (-1.0) ** mm * (-1j) * v / math.sqrt(2.0)
            out[(l, -mm)] = out.get((l, -mm), 0.0) + 1j * v / math.sqrt(2.0)
    return {k: complex(v) for k, v in out.items() if v != 0}
