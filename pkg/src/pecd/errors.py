"""Exception types shared across the package.

ValidationError covers rejected inputs (bad quantum numbers, malformed
tensors, infeasible bounds).  EvaluationError covers numerical failures
(non-convergent quadrature, overflow).  The CLI maps the former to exit
code 1 and the latter to exit code 2.
"""


class PecdError(Exception):
    """Base class for package errors."""


class ValidationError(PecdError):
    """Input rejected before any computation was attempted."""


class EvaluationError(PecdError):
    """A numerical evaluation failed (overflow, non-convergence)."""


class ForbiddenTransitionError(EvaluationError):
    """The two-photon step has zero probability for the requested
    polarization, so the orientation density cannot be normalized."""


class InternalInconsistencyError(PecdError):
    """A self-check failed; indicates a phase-convention bug, not bad input."""
