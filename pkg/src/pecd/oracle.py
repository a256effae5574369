"""Brute-force orientation-average validator for the PAD coefficients.

The analytic assembly in `pad` contracts six 3j symbols; this module never
touches that coupling path.  It computes the molecular-frame one-photon
amplitudes directly, rotates polarization and electron direction with
explicit Wigner D-matrices, weights by the two-photon orientation density
evaluated from its definition, integrates over the Euler angles on a
product quadrature grid, verifies that the averaged distribution is
azimuthally flat, and projects onto Legendre polynomials.

The integrand is a trigonometric polynomial of bounded degree, so the
default 32 x 24 x 32 grid integrates it exactly to rounding; results are
deterministic.  Intended for small instances only.
"""

from __future__ import annotations

import numpy as np

from .angular import sph_harm, wigner_d_small
from .errors import InternalInconsistencyError, ValidationError
from .pad import ExcitedState, L_REPORT, LegendreSpectrum, _as_spherical
from .quadrature import DEFAULT_ORIENTATION_GRID, OrientationGrid, gauss_legendre
from .radial import BoundRadialIndex, ContinuumModel, radial_integral
from .twophoton import validate_polarization

__all__ = ["OrientationGrid", "one_photon_amplitude", "oracle_legendre"]


def _channel_arms(state: ExcitedState, model: ContinuumModel):
    """(l, m, q, complex weight) per dipole-allowed ionization channel arm."""
    from .angular import gaunt_S

    arms = []
    for (n, lo, mo), a in state.coeffs.items():
        if a == 0:
            continue
        for l in (lo - 1, lo + 1):
            if l < 0:
                continue
            I = radial_integral(BoundRadialIndex(n, lo), l, model)
            z = (-1j) ** l * np.exp(1j * model.phase(l)) * I * a
            for q in (-1, 0, 1):
                m = mo + q
                if abs(m) > l:
                    continue
                S = gaunt_S(l, m, q, lo, mo)
                if S == 0.0:
                    continue
                arms.append((l, m, q, z * S))
    return arms


def one_photon_amplitude(
    state: ExcitedState, model: ContinuumModel, q: int, k_dir: tuple[float, float]
) -> complex:
    """Molecular-frame amplitude <Psi_k| r_q |Psi_o> up to a global constant.

    k_dir is the (theta, phi) direction of the photoelectron momentum in
    the molecular frame.
    """
    if q not in (-1, 0, 1):
        raise ValidationError("q must be a spherical index in {-1, 0, 1}")
    theta, phi = k_dir
    total = 0.0 + 0.0j
    for l, m, aq, w in _channel_arms(state, model):
        if aq != q:
            continue
        total += w * sph_harm(l, m, theta, phi)
    return complex(total)


def _rank1_D(grid: OrientationGrid, alpha_f, gamma_f, beta_idx) -> np.ndarray:
    """D(1)_{q,m} at every grid node; shape (N, 3, 3) indexed [node, q+1, m+1]."""
    d1 = np.empty((grid.n_beta, 3, 3))
    for i, mp in enumerate((-1, 0, 1)):
        for j, m in enumerate((-1, 0, 1)):
            d1[:, i, j] = wigner_d_small(1, mp, m, grid.beta)
    ms = np.array([-1.0, 0.0, 1.0])
    ea = np.exp(-1j * np.outer(alpha_f, ms))
    eg = np.exp(-1j * np.outer(gamma_f, ms))
    return ea[:, :, None] * d1[beta_idx] * eg[:, None, :]


def oracle_legendre(
    state: ExcitedState,
    tensor,
    rho1: int,
    rho2: int,
    model: ContinuumModel,
    grid: OrientationGrid = DEFAULT_ORIENTATION_GRID,
    n_theta: int = 16,
    n_phi: int = 8,
) -> LegendreSpectrum:
    """Lab-frame Legendre coefficients by direct Euler-angle quadrature.

    The returned spectrum carries an arbitrary overall scale; compare
    normalized coefficients c_L / c_0 against the analytic path.
    """
    rho1 = validate_polarization(rho1, "rho1")
    rho2 = validate_polarization(rho2, "rho2")
    t_sph = _as_spherical(tensor)

    alpha_f, beta_f, gamma_f, w_f = grid.nodes_weights()
    n_nodes = alpha_f.size
    beta_idx = (np.arange(n_nodes) // grid.n_gamma) % grid.n_beta

    arms = _channel_arms(state, model)
    l_list = sorted({l for l, *_ in arms})
    lm_list = [(l, m) for l in l_list for m in range(-l, l + 1)]
    lm_pos = {lm: i for i, lm in enumerate(lm_list)}
    b_tab = np.zeros((3, len(lm_list)), dtype=complex)
    for l, m, q, w in arms:
        b_tab[q + 1, lm_pos[(l, m)]] += w

    d1 = _rank1_D(grid, alpha_f, gamma_f, beta_idx)

    # two-photon orientation density from its definition (not via g^(K))
    dpol = d1[:, :, rho1 + 1]
    amp_2p = np.einsum("na,nb,ab->n", dpol, dpol, t_sph.t)
    rho_w = np.abs(amp_2p) ** 2 * w_f

    # lab-frame ionization amplitude components per (l, m'')
    f_tab = np.zeros((n_nodes, len(lm_list)), dtype=complex)
    d2 = d1[:, :, rho2 + 1]
    for l in l_list:
        nm = 2 * l + 1
        ms = np.arange(-l, l + 1, dtype=float)
        dsml = np.empty((grid.n_beta, nm, nm))
        for i in range(nm):
            for j in range(nm):
                dsml[:, i, j] = wigner_d_small(l, i - l, j - l, grid.beta)
        ea = np.exp(1j * np.outer(alpha_f, ms))  # conj of e^{-i m alpha}
        eg = np.exp(1j * np.outer(gamma_f, ms))
        cols = [lm_pos[(l, m)] for m in range(-l, l + 1)]
        for qi in range(3):
            coeff = b_tab[qi, cols]
            if not coeff.any():
                continue
            p = (coeff[None, :] * ea) * d2[:, qi, None]
            qmat = np.einsum("nm,nmk->nk", p, dsml[beta_idx])
            f_tab[:, cols] += qmat * eg
    gram = (f_tab.conj() * rho_w[:, None]).T @ f_tab

    # evaluate the averaged lab-frame PAD and check cylindrical symmetry
    x_th, w_th = gauss_legendre(n_theta)
    theta = np.arccos(x_th)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    th_g, ph_g = np.meshgrid(theta, phi, indexing="ij")
    ybasis = np.array([sph_harm(l, m, th_g, ph_g) for (l, m) in lm_list])
    pad = np.einsum("ij,itp,jtp->tp", gram, ybasis, ybasis.conj())
    if np.abs(pad.imag).max() > 1e-12 * max(np.abs(pad.real).max(), 1e-300):
        raise InternalInconsistencyError("averaged PAD is not real")
    pad = pad.real
    scale = max(np.abs(pad).max(), 1e-300)
    flat_dev = (pad.max(axis=1) - pad.min(axis=1)).max() / scale
    if flat_dev > 1e-9:
        raise InternalInconsistencyError(
            f"averaged PAD is not azimuthally flat (relative deviation {flat_dev:.3e}); "
            "phase conventions are inconsistent"
        )
    pad_theta = pad.mean(axis=1)

    from .angular import legendre_P

    c = np.array(
        [(2 * L + 1) / 2.0 * float((pad_theta * legendre_P(L, x_th)) @ w_th) for L in range(9)]
    )
    c_scale = max(abs(c[0]), 1e-300)
    if max(abs(c[7]), abs(c[8])) > 1e-10 * c_scale:
        raise InternalInconsistencyError("oracle PAD has content beyond L = 6")
    return LegendreSpectrum(
        c=c[:L_REPORT],
        energy_eV=model.momentum.energy_eV,
        rho1=rho1,
        rho2=rho2,
        norm_B=None,
    )
