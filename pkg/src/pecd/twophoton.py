"""Two-photon absorption tensor algebra.

Cartesian <-> spherical conversion, anisotropy decomposition, the
orientation density rho_2P driven by two identical photons, its
normalization, the rank-K polarization coupling coefficients g^(K), the
effective left/right tensor combination and the rotationally averaged
transition strengths.

Tensors are ingested as real symmetric Cartesian matrices (components in
a0^2/Eh as tabulated); the spherical representation is complex internally.
All operations are pure and safe for concurrent use.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .angular import EulerAngles, wigner_3j, wigner_D
from .errors import EvaluationError, ForbiddenTransitionError, ValidationError

__all__ = [
    "CartesianTensor2P",
    "SphericalTensor2P",
    "TensorDecomposition",
    "validate_polarization",
    "to_spherical",
    "to_cartesian",
    "g_coefficient",
    "g_table",
    "rho_2P",
    "normalization_B",
    "decompose",
    "effective_tensor",
    "averaged_strengths",
    "delta_TP",
    "rate_K",
    "rhombicity_axiality",
]

COMPONENT_ORDER = ("xx", "xy", "xz", "yy", "yz", "zz")

# rows q = -1, 0, +1 of the Cartesian -> spherical unit-vector map
_U = np.array(
    [
        [1.0 / math.sqrt(2.0), -1j / math.sqrt(2.0), 0.0],
        [0.0, 0.0, 1.0],
        [-1.0 / math.sqrt(2.0), -1j / math.sqrt(2.0), 0.0],
    ],
    dtype=complex,
)


def validate_polarization(rho: int, name: str = "polarization") -> int:
    if rho not in (-1, 0, 1):
        raise ValidationError(f"{name} must be -1, 0 or +1, got {rho!r}")
    return int(rho)


@dataclass(frozen=True)
class CartesianTensor2P:
    """Symmetric rank-2 two-photon tensor, Cartesian components."""

    xx: float
    xy: float
    xz: float
    yy: float
    yz: float
    zz: float

    @classmethod
    def from_matrix(cls, m, tol: float = 1e-12) -> "CartesianTensor2P":
        m = np.asarray(m, dtype=float)
        if m.shape != (3, 3):
            raise ValidationError(f"tensor matrix must be 3x3, got shape {m.shape}")
        scale = max(np.abs(m).max(), 1.0)
        names = ("x", "y", "z")
        for i in range(3):
            for j in range(i + 1, 3):
                if abs(m[i, j] - m[j, i]) > tol * scale:
                    raise ValidationError(
                        f"tensor is not symmetric in component ({names[i]}{names[j]}): "
                        f"{m[i, j]!r} vs {m[j, i]!r}"
                    )
        return cls(m[0, 0], m[0, 1], m[0, 2], m[1, 1], m[1, 2], m[2, 2])

    def to_matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.xx, self.xy, self.xz],
                [self.xy, self.yy, self.yz],
                [self.xz, self.yz, self.zz],
            ]
        )

    def components(self) -> tuple[float, ...]:
        return (self.xx, self.xy, self.xz, self.yy, self.yz, self.zz)

    def rotated(self, rot: np.ndarray) -> "CartesianTensor2P":
        return CartesianTensor2P.from_matrix(rot @ self.to_matrix() @ rot.T)

    def is_isotropic(self, tol: float = 1e-12) -> bool:
        d = decompose(self)
        scale = max(np.abs(self.to_matrix()).max(), 1.0)
        return (
            np.abs(d.diag_aniso).max() <= tol * scale
            and np.abs(d.offdiag).max() <= tol * scale
        )


@dataclass(frozen=True)
class SphericalTensor2P:
    """Spherical components T_{q1,q2}; t[q1+1, q2+1] with q in {-1,0,+1}."""

    t: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=complex)
        if t.shape != (3, 3):
            raise ValidationError("spherical tensor must be 3x3 in (q1, q2)")
        object.__setattr__(self, "t", t)

    def __getitem__(self, q: tuple[int, int]) -> complex:
        q1, q2 = q
        return self.t[q1 + 1, q2 + 1]

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.t) ** 2))


def to_spherical(t: CartesianTensor2P) -> SphericalTensor2P:
    """Exact linear map to spherical components, e.g. T_00 = T_zz,
    T_{-1,+1} = -(T_xx + T_yy)/2, T_{-1,-1} = (T_xx - 2i T_xy - T_yy)/2."""
    c = t.to_matrix().astype(complex)
    return SphericalTensor2P(_U @ c @ _U.T)


def to_cartesian(t: SphericalTensor2P, tol: float = 1e-10) -> CartesianTensor2P:
    uinv = _U.conj().T
    c = uinv @ t.t @ uinv.T
    if np.abs(c.imag).max() > tol * max(np.abs(c).max(), 1e-300):
        raise ValidationError("spherical tensor does not correspond to a real Cartesian tensor")
    return CartesianTensor2P.from_matrix(c.real)


@dataclass(frozen=True)
class TensorDecomposition:
    """Split T = alpha0 * Id + traceless diagonal + off-diagonal part."""

    alpha0: float
    diag_aniso: np.ndarray
    offdiag: np.ndarray

    @property
    def isotropic(self) -> bool:
        return bool(np.abs(self.diag_aniso).max() < 1e-12 and np.abs(self.offdiag).max() < 1e-12)


def decompose(t: CartesianTensor2P) -> TensorDecomposition:
    alpha0 = (t.xx + t.yy + t.zz) / 3.0
    return TensorDecomposition(
        alpha0=alpha0,
        diag_aniso=np.array([t.xx - alpha0, t.yy - alpha0, t.zz - alpha0]),
        offdiag=np.array([t.xy, t.xz, t.yz]),
    )


_g_tables: dict[int, np.ndarray] = {}
_g_lock = threading.Lock()


def g_coefficient(K: int, q1: int, q2: int, q3: int, q4: int, rho1: int) -> float:
    """Polarization coupling coefficient g^(K)_{q1,q2,q3,q4}(rho1).

    Double sum over the two-photon ranks Q, Q' in {0,1,2} of the six-3j
    product with weight (2Q+1)(2Q'+1)(2K+1); zero whenever a selection
    rule forbids the coupling.
    """
    if not 0 <= K <= 4:
        raise ValidationError("K must be between 0 and 4")
    for q in (q1, q2, q3, q4):
        validate_polarization(q, "spherical index")
    validate_polarization(rho1, "rho1")
    s = q1 + q2 - q3 - q4
    total = 0.0
    for Q in range(3):
        f1 = wigner_3j(1, 1, Q, q1, q2, -q1 - q2)
        if f1 == 0.0:
            continue
        f2 = wigner_3j(1, 1, Q, rho1, rho1, -2 * rho1)
        if f2 == 0.0:
            continue
        for Qp in range(3):
            f3 = wigner_3j(1, 1, Qp, q3, q4, -q3 - q4)
            if f3 == 0.0:
                continue
            f4 = wigner_3j(1, 1, Qp, rho1, rho1, -2 * rho1)
            f5 = wigner_3j(Q, Qp, K, q1 + q2, -q3 - q4, -s)
            f6 = wigner_3j(Q, Qp, K, 2 * rho1, -2 * rho1, 0)
            total += (
                (2 * Q + 1) * (2 * Qp + 1) * (2 * K + 1) * f1 * f2 * f3 * f4 * f5 * f6
            )
    return total


def g_table(rho1: int) -> np.ndarray:
    """g^(K) for all K and spherical indices; shape (5, 3, 3, 3, 3),
    indexed [K, q1+1, q2+1, q3+1, q4+1].  Cached per rho1."""
    validate_polarization(rho1, "rho1")
    tab = _g_tables.get(rho1)
    if tab is None:
        with _g_lock:
            tab = _g_tables.get(rho1)
            if tab is None:
                tab = np.zeros((5, 3, 3, 3, 3))
                for K in range(5):
                    for q1 in (-1, 0, 1):
                        for q2 in (-1, 0, 1):
                            for q3 in (-1, 0, 1):
                                for q4 in (-1, 0, 1):
                                    tab[K, q1 + 1, q2 + 1, q3 + 1, q4 + 1] = g_coefficient(
                                        K, q1, q2, q3, q4, rho1
                                    )
                _g_tables[rho1] = tab
    return tab


def two_photon_amplitude(t: SphericalTensor2P, rho1: int, omega: EulerAngles) -> complex:
    """Unnormalized amplitude sum_{q1,q2} D_{q1,rho1} D_{q2,rho1} T_{q1,q2}."""
    validate_polarization(rho1, "rho1")
    d = np.array([wigner_D(1, q, rho1, omega) for q in (-1, 0, 1)])
    return complex(d @ t.t @ d)


def normalization_B(t: SphericalTensor2P, rho1: int) -> float:
    """Orientation integral of the unnormalized two-photon density.

    Quadruple sum over spherical indices with Q <= 2 of tensor bilinears
    times four 3j symbols.  Zero is a legal output and means the
    transition is forbidden at this polarization.
    """
    validate_polarization(rho1, "rho1")
    total = 0.0
    for Q in range(3):
        fp = wigner_3j(1, 1, Q, rho1, rho1, -2 * rho1) ** 2
        if fp == 0.0:
            continue
        for q1 in (-1, 0, 1):
            for q2 in (-1, 0, 1):
                f1 = wigner_3j(1, 1, Q, q1, q2, -q1 - q2)
                if f1 == 0.0:
                    continue
                for q3 in (-1, 0, 1):
                    q4 = q1 + q2 - q3
                    if abs(q4) > 1:
                        continue
                    f2 = wigner_3j(1, 1, Q, q3, q4, -q3 - q4)
                    if f2 == 0.0:
                        continue
                    tt = t[q1, q2] * np.conj(t[q3, q4])
                    total += (2 * Q + 1) * f1 * f2 * tt.real
    return total


def rho_2P(t: SphericalTensor2P, rho1: int, omega: EulerAngles) -> float:
    """Normalized orientation density for two-photon absorption."""
    B = normalization_B(t, rho1)
    if B <= 1e-14 * max(t.norm2() ** 2, 1e-300):
        raise ForbiddenTransitionError(
            f"two-photon transition forbidden for rho1={rho1} (normalization is zero)"
        )
    amp = two_photon_amplitude(t, rho1, omega)
    return float(abs(amp) ** 2 / B)


def effective_tensor(left: CartesianTensor2P, right: CartesianTensor2P) -> CartesianTensor2P:
    """Componentwise signed geometric mean of left and right tensors.

    (T~)^2 equals left*right componentwise, so every rotationally averaged
    transition strength computed from the effective tensor matches the
    left/right pair exactly.
    """
    out = []
    scale = max(
        max(abs(v) for v in left.components()), max(abs(v) for v in right.components()), 1e-300
    )
    for name, lv, rv in zip(COMPONENT_ORDER, left.components(), right.components()):
        prod = lv * rv
        if prod < -1e-12 * scale**2:
            raise ValidationError(
                f"left/right tensors disagree in sign for component {name}: {lv!r} vs {rv!r}"
            )
        out.append(math.copysign(math.sqrt(max(prod, 0.0)), lv if lv != 0.0 else rv))
    return CartesianTensor2P(*out)


def averaged_strengths(
    left: CartesianTensor2P, right: CartesianTensor2P
) -> tuple[float, float, float]:
    """Rotationally averaged strengths (delta_F, delta_G, delta_H).

    delta_F = (1/30) tr(L) tr(R); delta_G = (1/30) sum L_ab R_ab;
    delta_H = (1/30) sum L_ab R_ba.  G = H for symmetric inputs.
    """
    lm, rm = left.to_matrix(), right.to_matrix()
    d_f = lm.trace() * rm.trace() / 30.0
    d_g = float(np.sum(lm * rm)) / 30.0
    d_h = float(np.sum(lm * rm.T)) / 30.0
    return (float(d_f), d_g, d_h)


def delta_TP(strengths: tuple[float, float, float], F: float, G: float, H: float) -> float:
    """Polarization-weighted combination F*dF + G*dG + H*dH (a0^4 Eh^-2)."""
    d_f, d_g, d_h = strengths
    return F * d_f + G * d_g + H * d_h

FINE_STRUCTURE = 7.2973525693e-3
BOHR_CM = 0.529177210903e-8
ATOMIC_TIME_S = 2.4188843265857e-17


def rate_K(delta_tp: float, w1_eV: float, w2_eV: float) -> float:
    """Two-photon transition probability rate constant in cm^4 s.

    K = hbar^2 t0 (2 pi)^2 alpha^2 w1 w2 delta_TP with the photon energies
    converted to atomic units (hbar = t0 = 1 there) and the a0^4 t0 unit
    volume converted to cm^4 s.
    """
    from .radial import HARTREE_EV

    w1 = w1_eV / HARTREE_EV
    w2 = w2_eV / HARTREE_EV
    k_au = (2.0 * math.pi) ** 2 * FINE_STRUCTURE**2 * w1 * w2 * delta_tp
    return k_au * BOHR_CM**4 * ATOMIC_TIME_S


def rhombicity_axiality(t: CartesianTensor2P) -> tuple[float, float, float]:
    """Shape descriptors (T_r, T_a, R) from the tensor eigenvalues.

    Eigenvalues sorted ascending are assigned to the (xx, yy, zz) axes of
    the eigenframe; with T0 the mean eigenvalue, b and e the deviations of
    the two smallest, T_r = (2/3)(b - e), T_a = -b - e and R = T_r / T_a.
    """
    evals = np.linalg.eigvalsh(t.to_matrix())
    t0 = evals.sum() / 3.0
    b = evals[0] - t0
    e = evals[1] - t0
    t_r = (2.0 / 3.0) * (b - e)
    t_a = -b - e
    scale = max(np.abs(evals).max(), 1e-300)
    if abs(t_a) <= 1e-12 * scale:
        raise EvaluationError("axiality is zero; rhombicity ratio undefined")
    return (float(t_r), float(t_a), float(t_r / t_a))
