"""Laboratory-frame PAD Legendre coefficients for the 2+1 ionization model.

The assembly couples the excited-state expansion coefficients, the
two-photon absorption tensor and the continuum radial/angular integrals
through six Wigner 3j symbols.  The multi-index sum is reorganized into

  * a tensor part W_K(s): spherical tensor bilinears contracted with the
    polarization couplings g^(K),
  * an electron part A: partial-wave pair amplitudes bucketed by the
    rank nu of the ionizing-polarization coupling, the Legendre order, and
    the magnetic transfers (t = q - q', dm = m' - m),
  * a final contraction over (K, nu, L, s, t) with the two closing 3j
    symbols, accumulated with compensated summation in a fixed order so
    results are bit-reproducible.

The loop extends to L = 8 and asserts that c_7 and c_8 vanish; only
c_0..c_6 are reported.  The overall constant (c~0 of the one-photon cross
section) is dropped; the two-photon normalization 1/B(rho1) is kept so
raw coefficients are physical up to that single constant, and the
published comparisons use c_L / c_0 where everything common cancels.
"""

from __future__ import annotations

import math
import threading
from collections import OrderedDict
from dataclasses import dataclass, field, replace

import numpy as np

from .angular import gaunt_S, wigner_3j
from .errors import (
    EvaluationError,
    ForbiddenTransitionError,
    InternalInconsistencyError,
    ValidationError,
)
from .radial import BoundRadialIndex, ContinuumModel, radial_integral
from .twophoton import (
    CartesianTensor2P,
    SphericalTensor2P,
    g_table,
    normalization_B,
    to_spherical,
    validate_polarization,
)

__all__ = [
    "ExcitedState",
    "LegendreSpectrum",
    "ContributionPattern",
    "legendre_coefficients",
    "pad_evaluate",
    "pecd_J",
    "predicted_pattern",
    "energy_averaged",
    "symmetry_transforms",
]

L_REPORT = 7  # c_0 .. c_6
L_ASSEMBLE = 9  # loop extended to L = 8 for the cutoff assertion


@dataclass(frozen=True)
class ExcitedState:
    """Single-center expansion coefficients a^{l_o}_{m_o}(n_o)."""

    coeffs: dict[tuple[int, int, int], complex]

    def __post_init__(self):
        if not self.coeffs:
            raise ValidationError("excited state needs at least one coefficient")
        clean = {}
        for (n, l, m), a in sorted(self.coeffs.items()):
            if n < 1 or not (0 <= l <= n - 1) or abs(m) > l:
                raise ValidationError(f"invalid excited-state index (n={n}, l={l}, m={m})")
            clean[(int(n), int(l), int(m))] = complex(a)
        if not any(a != 0 for a in clean.values()):
            raise ValidationError("excited state has no nonzero coefficient")
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def from_real_labels(cls, n_o: int, real_coeffs: dict[str, float]) -> "ExcitedState":
        from .angular import real_to_complex_coeffs

        conv = real_to_complex_coeffs(real_coeffs)
        return cls({(n_o, l, m): a for (l, m), a in conv.items()})

    @property
    def Lmax(self) -> int:
        return max(l for (_, l, _), a in self.coeffs.items() if a != 0)

    def channels(self) -> tuple[tuple[int, int, int], ...]:
        return tuple(sorted(self.coeffs))

    def amplitudes(self) -> np.ndarray:
        return np.array([self.coeffs[ch] for ch in self.channels()], dtype=complex)

    def parity_flipped(self) -> "ExcitedState":
        return ExcitedState({(n, l, m): (-1) ** l * a for (n, l, m), a in self.coeffs.items()})

    def scaled(self, z: complex) -> "ExcitedState":
        return ExcitedState({k: z * a for k, a in self.coeffs.items()})


@dataclass(frozen=True)
class LegendreSpectrum:
    """PAD expansion coefficients c_0..c_6 at one photoelectron energy."""

    c: np.ndarray
    energy_eV: float
    rho1: int
    rho2: int
    norm_B: float | None = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.shape != (L_REPORT,):
            raise ValidationError("LegendreSpectrum needs exactly 7 coefficients c_0..c_6")
        object.__setattr__(self, "c", c)

    def normalized(self) -> np.ndarray:
        if self.c[0] == 0.0:
            raise EvaluationError("c_0 is zero; normalized coefficients undefined")
        return self.c / self.c[0]


@dataclass(frozen=True)
class ContributionPattern:
    """Boolean mask of which c_L may be nonzero."""

    mask: tuple[bool, bool, bool, bool, bool, bool, bool]

    def allowed(self) -> set[int]:
        return {i for i, b in enumerate(self.mask) if b}


# ---------------------------------------------------------------------------
# tensor part W_K(s)

_PARITY_Q = np.array([[1.0, -1.0, 1.0], [-1.0, 1.0, -1.0], [1.0, -1.0, 1.0]])
_S_INDEX = (
    np.arange(3)[:, None, None, None]
    + np.arange(3)[None, :, None, None]
    - np.arange(3)[None, None, :, None]
    - np.arange(3)[None, None, None, :]
)  # q1+q2-q3-q4 in [-4, 4]


def tensor_W(tensor: SphericalTensor2P, rho1: int) -> np.ndarray:
    """W[K, s+4] = sum over spherical indices with q1+q2-q3-q4 = s of
    (-1)^(q3+q4) T_{q1,q2} T*_{q3,q4} g^(K)(rho1)."""
    g = g_table(rho1)
    tt = np.einsum("ab,cd->abcd", tensor.t, tensor.t.conj())
    tt = tt * _PARITY_Q[None, None, :, :]
    s_flat = (_S_INDEX + 4).ravel()
    w = np.zeros((5, 9), dtype=complex)
    for K in range(5):
        vals = (tt * g[K]).ravel()
        w[K] = np.bincount(s_flat, weights=vals.real, minlength=9) + 1j * np.bincount(
            s_flat, weights=vals.imag, minlength=9
        )
    return w


# ---------------------------------------------------------------------------
# final contraction metadata: coeff(K, nu, L, s, t) for the two closing 3j

_contraction_cache: list[list[tuple[int, int, int, int, float]]] | None = None
_contraction_lock = threading.Lock()


def _contraction_terms() -> list[list[tuple[int, int, int, int, float]]]:
    global _contraction_cache
    if _contraction_cache is None:
        with _contraction_lock:
            if _contraction_cache is None:
                per_l: list[list[tuple[int, int, int, int, float]]] = []
                for L in range(L_ASSEMBLE):
                    terms = []
                    for K in range(5):
                        for nu in range(3):
                            if (K + nu + L) % 2 or not (abs(K - nu) <= L <= K + nu):
                                continue
                            g0 = wigner_3j(K, nu, L, 0, 0, 0)
                            if g0 == 0.0:
                                continue
                            pre = (2 * nu + 1) * (2 * L + 1) * g0
                            for s in range(-K, K + 1):
                                for t in range(-nu, nu + 1):
                                    dm = -s - t
                                    if abs(dm) > L or abs(dm) > 8:
                                        continue
                                    w3 = wigner_3j(K, nu, L, s, t, dm)
                                    if w3 == 0.0:
                                        continue
                                    terms.append((K, s, nu, t, pre * w3))
                    per_l.append(terms)
                _contraction_cache = per_l
    return _contraction_cache


# ---------------------------------------------------------------------------
# electron part: partial-wave pair engine

_N_T = 5  # t = q - q' in [-2, 2]
_N_DM = 17  # dm = m' - m in [-8, 8]


class CoefficientEngine:
    """Precomputed pair tables for a fixed channel structure and rho2.

    Static 3j products are built once; only the energy-dependent arm
    weights (radial integral and Coulomb phase) and the state amplitudes
    enter per evaluation.  `phase_convention` selects the sign variant of
    the (-1)^(m'-q-rho2) factor; "flipped" uses the (-1)^(m'+q'-rho2)
    variant and exists as a debug hook for the oracle cross-check.
    """

    def __init__(self, channels, rho2: int, phase_convention: str = "standard"):
        if phase_convention not in ("standard", "flipped"):
            raise ValidationError(f"unknown phase convention {phase_convention!r}")
        self.channels = tuple(channels)
        self.rho2 = validate_polarization(rho2, "rho2")
        self.phase_convention = phase_convention

        arms_ich, arms_nll, arms_S, arms_l, arms_m, arms_q = [], [], [], [], [], []
        for ich, (n, lo, mo) in enumerate(self.channels):
            for l in (lo - 1, lo + 1):
                if l < 0:
                    continue
                for q in (-1, 0, 1):
                    m = mo + q
                    if abs(m) > l:
                        continue
                    S = gaunt_S(l, m, q, lo, mo)
                    if S == 0.0:
                        continue
                    arms_ich.append(ich)
                    arms_nll.append((n, lo, l))
                    arms_S.append(S)
                    arms_l.append(l)
                    arms_m.append(m)
                    arms_q.append(q)
        if not arms_ich:
            raise ValidationError("no dipole-allowed ionization channels for this state")
        self.arm_ich = np.array(arms_ich)
        self.arm_nll = arms_nll
        self.arm_l = np.array(arms_l)
        n_arms = len(arms_ich)

        w3_nu2 = [wigner_3j(1, 1, nu, self.rho2, -self.rho2, 0) for nu in range(3)]
        sign = +1.0 if phase_convention == "standard" else -1.0

        p_pair, p_i1, p_i2, base = [], [], [], []
        coo_p, coo_idx, coo_val = [], [], []
        npair = 0
        for i1 in range(n_arms):
            l1, m1, q1, S1 = arms_l[i1], arms_m[i1], arms_q[i1], arms_S[i1]
            for i2 in range(n_arms):
                l2, m2, q2, S2 = arms_l[i2], arms_m[i2], arms_q[i2], arms_S[i2]
                t = q1 - q2
                dm = m2 - m1
                fnu = np.array(
                    [wigner_3j(1, 1, nu, q1, -q2, -t) * w3_nu2[nu] for nu in range(3)]
                )
                if not fnu.any():
                    continue
                fl = np.zeros(L_ASSEMBLE)
                pref = math.sqrt((2 * l1 + 1) * (2 * l2 + 1))
                for L in range(abs(l1 - l2), min(l1 + l2, L_ASSEMBLE - 1) + 1):
                    fl[L] = (
                        pref
                        * wigner_3j(l1, l2, L, 0, 0, 0)
                        * wigner_3j(l1, l2, L, m1, -m2, dm)
                    )
                if not fl.any():
                    continue
                if phase_convention == "standard":
                    phase = (-1.0) ** (m2 - q1 - self.rho2)
                else:
                    phase = (-1.0) ** (m2 + q2 - self.rho2)
                p_i1.append(i1)
                p_i2.append(i2)
                base.append(S1 * S2 * phase)
                for nu in range(3):
                    if fnu[nu] == 0.0:
                        continue
                    for L in range(L_ASSEMBLE):
                        v = fnu[nu] * fl[L]
                        if v == 0.0:
                            continue
                        coo_p.append(npair)
                        coo_idx.append(
                            ((nu * L_ASSEMBLE + L) * _N_T + (t + 2)) * _N_DM + (dm + 8)
                        )
                        coo_val.append(v)
                npair += 1
        self.pair_i1 = np.array(p_i1)
        self.pair_i2 = np.array(p_i2)
        self.pair_base = np.array(base)
        self.coo_p = np.array(coo_p)
        self.coo_idx = np.array(coo_idx)
        self.coo_val = np.array(coo_val)
        self._n_flat = 3 * L_ASSEMBLE * _N_T * _N_DM
        self._weights_cache: dict[tuple, np.ndarray] = {}
        self._lock = threading.Lock()

    def arm_weights(self, model: ContinuumModel) -> np.ndarray:
        """Per-arm factor (-i)^l e^(i delta_l) I(n, lo -> l) at the model energy."""
        key = (model.kind, model.momentum.energy_eV)
        got = self._weights_cache.get(key)
        if got is None:
            vals = np.empty(len(self.arm_l), dtype=complex)
            for i, (n, lo, l) in enumerate(self.arm_nll):
                I = radial_integral(BoundRadialIndex(n, lo), l, model)
                vals[i] = (-1j) ** l * np.exp(1j * model.phase(l)) * I
            with self._lock:
                self._weights_cache[key] = vals
            got = vals
        return got

    def assemble(self, avec: np.ndarray, w_tensor: np.ndarray, model: ContinuumModel) -> np.ndarray:
        """Full coefficient sum; returns complex c_L for L = 0..8."""
        u = self.arm_weights(model) * avec[self.arm_ich]
        amp = u[self.pair_i1] * u.conj()[self.pair_i2] * self.pair_base
        vals = amp[self.coo_p] * self.coo_val
        a_flat = np.bincount(self.coo_idx, weights=vals.real, minlength=self._n_flat) + (
            1j * np.bincount(self.coo_idx, weights=vals.imag, minlength=self._n_flat)
        )
        a_tab = a_flat.reshape(3, L_ASSEMBLE, _N_T, _N_DM)

        out = np.zeros(L_ASSEMBLE, dtype=complex)
        terms = _contraction_terms()
        for L in range(L_ASSEMBLE):
            acc = 0.0 + 0.0j
            comp = 0.0 + 0.0j  # Kahan compensation, fixed term order
            for K, s, nu, t, coeff in terms[L]:
                w = w_tensor[K, s + 4]
                if w == 0.0:
                    continue
                a_val = a_tab[nu, L, t + 2, -s - t + 8]
                if a_val == 0.0:
                    continue
                y = coeff * w * a_val - comp
                total = acc + y
                comp = (total - acc) - y
                acc = total
            out[L] = acc
        return out


_engine_cache: OrderedDict[tuple, CoefficientEngine] = OrderedDict()
_engine_lock = threading.Lock()


def _get_engine(channels, rho2: int, phase_convention: str) -> CoefficientEngine:
    key = (channels, rho2, phase_convention)
    with _engine_lock:
        eng = _engine_cache.get(key)
        if eng is not None:
            _engine_cache.move_to_end(key)
            return eng
    eng = CoefficientEngine(channels, rho2, phase_convention)
    with _engine_lock:
        _engine_cache[key] = eng
        while len(_engine_cache) > 32:
            _engine_cache.popitem(last=False)
    return eng


def _as_spherical(tensor) -> SphericalTensor2P:
    if isinstance(tensor, CartesianTensor2P):
        return to_spherical(tensor)
    if isinstance(tensor, SphericalTensor2P):
        return tensor
    raise ValidationError(f"expected a two-photon tensor, got {type(tensor).__name__}")


def legendre_coefficients(
    state: ExcitedState,
    tensor,
    rho1: int,
    rho2: int,
    model: ContinuumModel,
    phase_convention: str = "standard",
) -> LegendreSpectrum:
    """Lab-frame PAD Legendre coefficients c_0..c_6.

    Raises ForbiddenTransitionError when the two-photon step has zero
    probability at this polarization, and EvaluationError when there is no
    ionization signal (c_0 = 0).
    """
    rho1 = validate_polarization(rho1, "rho1")
    rho2 = validate_polarization(rho2, "rho2")
    t_sph = _as_spherical(tensor)
    B = normalization_B(t_sph, rho1)
    if B <= 1e-14 * max(t_sph.norm2() ** 2, 1e-300):
        raise ForbiddenTransitionError(
            f"two-photon transition forbidden for rho1={rho1}; the PAD is undefined"
        )
    w_tensor = tensor_W(t_sph, rho1)
    engine = _get_engine(state.channels(), rho2, phase_convention)
    cfull = engine.assemble(state.amplitudes(), w_tensor, model)

    scale = abs(cfull[0])
    if scale == 0.0:
        raise EvaluationError("no ionization signal (c_0 = 0)")
    if np.abs(cfull.imag).max() > 1e-10 * scale:
        raise InternalInconsistencyError(
            f"assembled coefficients are not real (max imag {np.abs(cfull.imag).max():.3e} "
            f"vs c0 {scale:.3e})"
        )
    if max(abs(cfull[7]), abs(cfull[8])) > 1e-12 * scale:
        raise InternalInconsistencyError(
            "coefficients beyond L = 6 do not vanish; assembly is inconsistent"
        )
    return LegendreSpectrum(
        c=cfull.real[:L_REPORT] / B,
        energy_eV=model.momentum.energy_eV,
        rho1=rho1,
        rho2=rho2,
        norm_B=B,
    )


def pad_evaluate(spec: LegendreSpectrum, theta: float) -> float | np.ndarray:
    """PAD value sum_L c_L P_L(cos theta) at polar angle theta (radians)."""
    x = np.cos(np.asarray(theta, dtype=float))
    return np.polynomial.legendre.legval(x, spec.c)


def pecd_J(spec: LegendreSpectrum) -> float:
    """Scalar PECD metric (2 c1 - c3/2 + c5/4) / c0."""
    c = spec.normalized()
    return float(2.0 * c[1] - 0.5 * c[3] + 0.25 * c[5])


_WAVE_NAMES = {0: "s", 1: "p", 2: "d", 3: "f"}

# Contribution mask of the PAD per polarization class and partial-wave
# cutoff; upper block for isotropic tensors, lower for anisotropic ones.
_PATTERN_ISO = {
    "lin_circ": ({0, 2}, {0, 2}, {0, 1, 2}, {0, 1, 2}),
    "circ_lin": (set(), set(), set(), set()),
    "lin_lin": ({0, 2}, {0, 2}, {0, 2}, {0, 2}),
    "circ_same": (set(), set(), set(), set()),
    "circ_opp": (set(), set(), set(), set()),
}
_PATTERN_ANISO = {
    "lin_circ": ({0, 2}, {0, 2, 4}, {0, 1, 2, 3, 4, 6}, {0, 1, 2, 3, 4, 5, 6}),
    "circ_lin": ({0, 2}, {0, 2, 4}, {0, 2, 4, 6}, {0, 2, 4, 6}),
    "lin_lin": ({0, 2}, {0, 2, 4}, {0, 2, 4, 6}, {0, 2, 4, 6}),
    "circ_same": ({0, 2}, {0, 2, 4}, {0, 1, 2, 3, 4, 6}, {0, 1, 2, 3, 4, 5, 6}),
    "circ_opp": ({0, 2}, {0, 2, 4}, {0, 1, 2, 3, 4, 6}, {0, 1, 2, 3, 4, 5, 6}),
}


def polarization_class(rho1: int, rho2: int) -> str:
    validate_polarization(rho1, "rho1")
    validate_polarization(rho2, "rho2")
    if rho1 == 0 and rho2 == 0:
        return "lin_lin"
    if rho1 == 0:
        return "lin_circ"
    if rho2 == 0:
        return "circ_lin"
    return "circ_same" if rho1 == rho2 else "circ_opp"


def predicted_pattern(
    Lmax: int, tensor_isotropic: bool, rho1: int, rho2: int
) -> ContributionPattern:
    """Which c_L may be nonzero for a given wave cutoff and polarizations."""
    if Lmax not in (0, 1, 2, 3):
        raise ValidationError("Lmax must be 0 (s) through 3 (f)")
    table = _PATTERN_ISO if tensor_isotropic else _PATTERN_ANISO
    allowed = table[polarization_class(rho1, rho2)][Lmax]
    return ContributionPattern(tuple(i in allowed for i in range(L_REPORT)))


def energy_averaged(
    state: ExcitedState,
    tensor,
    rho1: int,
    rho2: int,
    model: ContinuumModel,
    center_eV: float,
    fwhm_eV: float,
    n_nodes: int = 21,
    phase_convention: str = "standard",
) -> LegendreSpectrum:
    """Gaussian energy average of c_L over n_nodes spanning +-2 sigma."""
    if not center_eV > fwhm_eV / 2.0:
        raise ValidationError("energy center must exceed fwhm/2 (threshold guard)")
    sigma = fwhm_eV / (2.0 * math.sqrt(2.0 * math.log(2.0)))
    energies = center_eV + np.linspace(-2.0 * sigma, 2.0 * sigma, n_nodes)
    from .radial import ENERGY_FLOOR_EV

    if energies.min() < ENERGY_FLOOR_EV:
        raise ValidationError("energy averaging window extends below the energy floor")
    weights = np.exp(-((energies - center_eV) ** 2) / (2.0 * sigma**2))
    weights /= weights.sum()
    acc = np.zeros(L_REPORT)
    norm_b = None
    for e, w in zip(energies, weights):
        spec = legendre_coefficients(
            state, tensor, rho1, rho2, model.with_energy(float(e)), phase_convention
        )
        acc += w * spec.c
        norm_b = spec.norm_B
    return LegendreSpectrum(acc, center_eV, rho1, rho2, norm_b)


def symmetry_transforms(
    state: ExcitedState,
    tensor,
    rho1: int,
    rho2: int,
    model: ContinuumModel,
) -> dict[str, LegendreSpectrum]:
    """Base spectrum plus the four symmetry-transformed ones.

    Keys: base, both_flipped (-rho1, -rho2), ionization_flipped
    (rho1, -rho2), twophoton_flipped (-rho1, rho2) and parity_state
    (a -> (-1)^l a); used by the property suite to check the helicity and
    parity laws.
    """
    return {
        "base": legendre_coefficients(state, tensor, rho1, rho2, model),
        "both_flipped": legendre_coefficients(state, tensor, -rho1, -rho2, model),
        "ionization_flipped": legendre_coefficients(state, tensor, rho1, -rho2, model),
        "twophoton_flipped": legendre_coefficients(state, tensor, -rho1, rho2, model),
        "parity_state": legendre_coefficients(state.parity_flipped(), tensor, rho1, rho2, model),
    }
