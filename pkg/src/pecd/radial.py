"""Hydrogenic radial functions and dipole integrals in atomic units.

The photoelectron continuum uses energy-normalized Coulomb radial
functions for a Z = 1 point ion (electron mass 1), evaluated through the
integral representation of the Kummer confluent hypergeometric function;
the closed series form suffers catastrophic cancellation at large k*r in
double precision.  A plane-wave alternative (energy-normalized spherical
Bessel functions, zero phase shifts) is provided for comparison runs.

Bound states use the standard unit-normalized hydrogen radial functions
with the reduced-mass factor approximated as 1.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import eval_genlaguerre, loggamma, spherical_jn

from .errors import EvaluationError, ValidationError
from .quadrature import composite_gauss, tanh_sinh_01

__all__ = [
    "HARTREE_EV",
    "PhotoelectronMomentum",
    "ContinuumKind",
    "ContinuumModel",
    "BoundRadialIndex",
    "coulomb_phase",
    "continuum_G",
    "plane_wave_radial",
    "bound_R",
    "bound_r_max",
    "radial_integral",
    "clear_radial_cache",
]

HARTREE_EV = 27.211386

ENERGY_FLOOR_EV = 0.01


@dataclass(frozen=True)
class PhotoelectronMomentum:
    """Asymptotic photoelectron momentum, k = sqrt(2E) in atomic units."""

    energy_eV: float

    def __post_init__(self):
        if not (self.energy_eV >= ENERGY_FLOOR_EV):
            raise ValidationError(
                f"photoelectron energy {self.energy_eV} eV is below the {ENERGY_FLOOR_EV} eV floor"
            )

    @property
    def k_au(self) -> float:
        return math.sqrt(2.0 * self.energy_eV / HARTREE_EV)


class ContinuumKind(Enum):
    COULOMB = "coulomb"
    PLANE_WAVE = "plane"


@dataclass(frozen=True)
class ContinuumModel:
    """Photoelectron radial basis: Coulomb (with per-l phases) or plane wave."""

    kind: ContinuumKind
    momentum: PhotoelectronMomentum

    def phase(self, l: int) -> float:
        if self.kind is ContinuumKind.COULOMB:
            return coulomb_phase(l, self.momentum)
        return 0.0

    def radial(self, l: int, r) -> np.ndarray:
        if self.kind is ContinuumKind.COULOMB:
            return continuum_G(l, self.momentum, r)
        return plane_wave_radial(l, self.momentum, r)

    def with_energy(self, energy_eV: float) -> "ContinuumModel":
        return ContinuumModel(self.kind, PhotoelectronMomentum(energy_eV))


@dataclass(frozen=True)
class BoundRadialIndex:
    n_o: int
    l_o: int

    def __post_init__(self):
        if self.n_o < 1 or not (0 <= self.l_o <= self.n_o - 1):
            raise ValidationError(f"invalid bound radial index (n={self.n_o}, l={self.l_o})")


def coulomb_phase(l: int, k: PhotoelectronMomentum) -> float:
    """Coulomb phase shift arg Gamma(l + 1 - i/k), continuous in l.

    Only phase differences enter the observables.  scipy's loggamma gives
    the branch that is continuous along the real-l direction.
    """
    if l < 0:
        raise ValidationError("l must be >= 0")
    return float(loggamma(l + 1 - 1j / k.k_au).imag)


def _continuum_prefactor_log(l: int, k: float) -> float:
    # log of sqrt(2k/pi) * |Gamma(l+1-i/k)|^-1 * e^(pi/2k); combined in log
    # space because the last two factors overflow separately at small k
    return (
        0.5 * math.log(2.0 * k / math.pi)
        - float(loggamma(l + 1 - 1j / k).real)
        + math.pi / (2.0 * k)
    )


def _kummer_integral(l: int, eta: float, kr: np.ndarray, n_panels: int) -> np.ndarray:
    # int_0^1 s^(l+i eta) (1-s)^(l-i eta) e^(2i kr s) ds after the logistic
    # substitution s = 1/(1+e^-x), which converts the oscillatory-log
    # endpoint behavior (s^(i eta) near 0, (1-s)^(-i eta) near 1) into a
    # bounded-frequency oscillation with e^(-(l+1)|x|) decay
    x_max = 42.0 / (l + 1) + 5.0
    x, w = composite_gauss(32, np.linspace(-x_max, x_max, n_panels + 1))
    ln_s = np.minimum(x, 0.0) - np.log1p(np.exp(-np.abs(x)))
    ln_1ms = np.minimum(-x, 0.0) - np.log1p(np.exp(-np.abs(x)))
    s = np.exp(ln_s)
    base = (l + 1.0 + 1j * eta) * ln_s + (l + 1.0 - 1j * eta) * ln_1ms
    return np.exp(base[None, :] + 2j * np.outer(kr, s)) @ w


def continuum_G(l: int, k: PhotoelectronMomentum, r, rel_tol: float = 1e-11):
    """Energy-normalized Coulomb radial function G_{k,l}(r), real valued.

    Evaluated from the integral representation of the Kummer function,
    int_0^1 s^(l+i/k) (1-s)^(l-i/k) e^(2ikrs) ds, on a panel grid whose
    node count doubles until the result is converged.
    """
    ka = k.k_au
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r_arr < 0):
        raise ValidationError("r must be >= 0")
    eta = 1.0 / ka
    kr = ka * r_arr
    # initial panel count from the total oscillation budget
    x_max = 42.0 / (l + 1) + 5.0
    budget = 2.0 * eta * x_max + 0.5 * float(kr.max(initial=0.0)) + 60.0
    n_panels = max(8, int(budget / 24.0))
    prev = _kummer_integral(l, eta, kr, n_panels)
    integral = None
    for _ in range(5):
        n_panels *= 2
        cur = _kummer_integral(l, eta, kr, n_panels)
        scale = max(float(np.abs(cur).max()), 1e-300)
        if float(np.abs(cur - prev).max()) <= rel_tol * scale:
            integral = cur
            break
        prev = cur
    if integral is None:
        raise EvaluationError(
            f"continuum_G quadrature did not converge at l={l}, k={ka:.6g}"
        )
    log_pre = _continuum_prefactor_log(l, ka)
    with np.errstate(divide="ignore"):
        log_r_part = l * np.log(2.0 * ka * r_arr) if l > 0 else np.zeros_like(r_arr)
    log_r_part = np.where(r_arr > 0, log_r_part, -np.inf if l > 0 else 0.0)
    vals = np.exp(log_pre + log_r_part - 1j * ka * r_arr) * integral
    if not np.all(np.isfinite(vals)):
        raise EvaluationError(
            f"continuum_G overflowed at l={l}, k={ka:.6g}, max kr={ka * r_arr.max():.3g}"
        )
    scale = np.max(np.abs(vals)) or 1.0
    if np.max(np.abs(vals.imag)) > 1e-10 * scale:
        raise EvaluationError(f"continuum_G imaginary residue too large at l={l}, k={ka:.6g}")
    out = vals.real
    return out if np.ndim(r) else float(out[0])


def plane_wave_radial(l: int, k: PhotoelectronMomentum, r) -> np.ndarray:
    """Energy-normalized free radial function sqrt(2k/pi) j_l(kr)."""
    ka = k.k_au
    return math.sqrt(2.0 * ka / math.pi) * spherical_jn(l, ka * np.asarray(r, dtype=float))


def bound_R(idx: BoundRadialIndex, r) -> np.ndarray | float:
    """Unit-normalized hydrogen radial function R_{n,l}(r), Z = 1."""
    n, l = idx.n_o, idx.l_o
    r_arr = np.asarray(r, dtype=float)
    rho = 2.0 * r_arr / n
    norm = math.sqrt((2.0 / n) ** 3 * math.factorial(n - l - 1) / (2.0 * n * math.factorial(n + l)))
    vals = norm * np.exp(-rho / 2.0) * rho**l * eval_genlaguerre(n - l - 1, 2 * l + 1, rho)
    return vals if np.ndim(r) else float(vals)


def bound_r_max(idx: BoundRadialIndex, rel_cut: float = 1e-12) -> float:
    """Radius beyond which |R| stays below rel_cut * max|R|."""
    r = np.linspace(1e-3, 80.0 * idx.n_o, 4000)
    vals = np.abs(bound_R(idx, r))
    cut = rel_cut * vals.max()
    above = np.nonzero(vals >= cut)[0]
    return float(r[min(above[-1] + 1, len(r) - 1)])


_radial_cache: dict[tuple, float] = {}
_radial_lock = threading.Lock()


def radial_integral(idx: BoundRadialIndex, l: int, model: ContinuumModel) -> float:
    """Dipole radial integral I = (4 pi / 3) int r^3 G_{k,l}(r) R_{n,lo}(r) dr.

    Composite Gauss-Legendre on [0, r_max]; node count doubles until the
    result is stable to 1e-8 relative.  Values are cached per
    (n, lo, l, energy, continuum kind); the cache tolerates concurrent
    readers.
    """
    if abs(l - idx.l_o) != 1:
        raise ValidationError(
            f"radial_integral expects a dipole-allowed pair, got l={l}, l_o={idx.l_o}"
        )
    key = (idx.n_o, idx.l_o, l, model.kind, model.momentum.energy_eV)
    val = _radial_cache.get(key)
    if val is not None:
        return val

    r_max = bound_r_max(idx)
    n_panels = max(8, int(model.momentum.k_au * r_max / 3.0) + 8)
    edges = np.linspace(0.0, r_max, n_panels + 1)
    prev = None
    for n_nodes in (16, 32, 64, 128):
        r, w = composite_gauss(n_nodes, edges)
        integrand = r**3 * model.radial(l, r) * bound_R(idx, r)
        cur = (4.0 * math.pi / 3.0) * float(integrand @ w)
        if prev is not None and abs(cur - prev) <= 1e-8 * max(abs(cur), 1e-300):
            with _radial_lock:
                _radial_cache[key] = cur
            return cur
        prev = cur
    raise EvaluationError(
        f"radial_integral did not converge for n={idx.n_o}, lo={idx.l_o}, l={l}, "
        f"E={model.momentum.energy_eV} eV"
    )


def clear_radial_cache() -> None:
    with _radial_lock:
        _radial_cache.clear()
