"""Quadrature helpers: Gauss-Legendre panels, tanh-sinh nodes for
endpoint-singular integrands, and the normalized Euler-angle product grid.

All node/weight sets are cached; callers treat them as read-only.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

_gl_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
_gl_lock = threading.Lock()


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1], cached per order."""
    got = _gl_cache.get(n)
    if got is None:
        with _gl_lock:
            got = _gl_cache.get(n)
            if got is None:
                x, w = roots_legendre(n)
                got = (x, w)
                _gl_cache[n] = got
    return got


def gauss_legendre_ab(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = gauss_legendre(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def composite_gauss(n_per_panel: int, edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule over consecutive panels given by edges."""
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre_ab(n_per_panel, a, b)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


_ts_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
_ts_lock = threading.Lock()


def tanh_sinh_01(level: int) -> tuple[np.ndarray, np.ndarray]:
    """tanh-sinh nodes/weights for integrals over (0, 1).

    Step h = 2**-level.  The double-exponential decay of the weights makes
    the rule robust against the oscillatory-logarithmic endpoint behavior of
    the Coulomb integral representation (s^(l+i/k) near 0, (1-s)^(l-i/k)
    near 1), which defeats plain Gauss rules at l = 0.
    """
    got = _ts_cache.get(level)
    if got is None:
        with _ts_lock:
            got = _ts_cache.get(level)
            if got is None:
                h = 2.0 ** (-level)
                # keep nodes strictly inside (0,1) and weights above underflow
                t_max = 6.1
                t = np.arange(-t_max, t_max + h / 2, h)
                u = 0.5 * np.pi * np.sinh(t)
                x = 0.5 * (1.0 + np.tanh(u))
                w = h * 0.25 * np.pi * np.cosh(t) / np.cosh(u) ** 2
                keep = (x > 0.0) & (x < 1.0) & (w > 1e-300)
                got = (x[keep], w[keep])
                _ts_cache[level] = got
    return got


@dataclass(frozen=True)
class OrientationGrid:
    """Product grid for the Euler-angle measure da d(cos b) dg / 8 pi^2.

    alpha and gamma use uniform (trapezoid-on-a-circle) nodes, beta uses
    Gauss-Legendre in cos(beta).  Weights sum to 1, and the rule is exact
    for trigonometric polynomials up to the grid's bandwidth.
    """

    n_alpha: int
    n_beta: int
    n_gamma: int

    @property
    def alpha(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_alpha) / self.n_alpha

    @property
    def gamma(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_gamma) / self.n_gamma

    @property
    def cos_beta(self) -> np.ndarray:
        return gauss_legendre(self.n_beta)[0]

    @property
    def beta(self) -> np.ndarray:
        return np.arccos(self.cos_beta)

    @property
    def beta_weights(self) -> np.ndarray:
        # GL weights on [-1,1] sum to 2; the 1/2 normalizes the cos(beta) measure
        return gauss_legendre(self.n_beta)[1] / 2.0

    def nodes_weights(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Flattened (alpha, beta, gamma, weight) arrays; weights sum to 1."""
        a, b, g = np.meshgrid(self.alpha, self.beta, self.gamma, indexing="ij")
        wb = self.beta_weights
        w = np.ones((self.n_alpha, self.n_beta, self.n_gamma))
        w *= wb[None, :, None]
        w /= self.n_alpha * self.n_gamma
        return a.ravel(), b.ravel(), g.ravel(), w.ravel()


DEFAULT_ORIENTATION_GRID = OrientationGrid(32, 24, 32)
