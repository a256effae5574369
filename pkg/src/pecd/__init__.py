"""Photoelectron circular dichroism from 2+1 multi-photon ionization.

Analytic lab-frame PAD Legendre coefficients for randomly oriented chiral
molecules, built from a two-photon absorption tensor and a single-center
expansion of the resonant intermediate state, with an independent
orientation-quadrature oracle, two-photon strength observables and bounded
fitting against measured coefficients.
"""

from .angular import EulerAngles, real_to_complex_coeffs, wigner_3j
from .errors import (
    EvaluationError,
    ForbiddenTransitionError,
    InternalInconsistencyError,
    PecdError,
    ValidationError,
)
from .pad import (
    ExcitedState,
    LegendreSpectrum,
    energy_averaged,
    legendre_coefficients,
    pad_evaluate,
    pecd_J,
    predicted_pattern,
    symmetry_transforms,
)
from .quadrature import OrientationGrid
from .radial import ContinuumKind, ContinuumModel, PhotoelectronMomentum
from .twophoton import (
    CartesianTensor2P,
    SphericalTensor2P,
    averaged_strengths,
    decompose,
    delta_TP,
    effective_tensor,
    rate_K,
    rhombicity_axiality,
    to_cartesian,
    to_spherical,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "EulerAngles",
    "real_to_complex_coeffs",
    "wigner_3j",
    "PecdError",
    "ValidationError",
    "EvaluationError",
    "ForbiddenTransitionError",
    "InternalInconsistencyError",
    "ExcitedState",
    "LegendreSpectrum",
    "legendre_coefficients",
    "pad_evaluate",
    "pecd_J",
    "predicted_pattern",
    "energy_averaged",
    "symmetry_transforms",
    "OrientationGrid",
    "ContinuumKind",
    "ContinuumModel",
    "PhotoelectronMomentum",
    "CartesianTensor2P",
    "SphericalTensor2P",
    "to_spherical",
    "to_cartesian",
    "decompose",
    "effective_tensor",
    "averaged_strengths",
    "delta_TP",
    "rate_K",
    "rhombicity_axiality",
]
