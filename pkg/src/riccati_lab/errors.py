"""Exception hierarchy.

Every failure the library can signal deliberately derives from
:class:`RiccatiLabError`; numerical defects (certified assumptions violated at
runtime) carry enough state to diagnose the offending computation.
"""

from __future__ import annotations

__all__ = [
    "RiccatiLabError",
    "SingularFactor",
    "NotPsd",
    "NotPd",
    "NotSymmetric",
    "UncertifiedSystem",
    "IdentityViolation",
    "NoConvergence",
    "SpectralCertificateFailure",
    "Divergence",
    "SingularA",
    "InvalidHorizon",
    "SingularL",
    "ScanExhausted",
    "BoundViolation",
]


class RiccatiLabError(Exception):
    """Base class for all library errors."""


class NotSymmetric(RiccatiLabError):
    """Input fails the symmetry test at construction."""


class NotPsd(RiccatiLabError):
    """Input is not positive semi-definite within tolerance."""


class NotPd(RiccatiLabError):
    """Input is not positive definite within tolerance."""


class SingularFactor(RiccatiLabError):
    """A required matrix inverse failed numerically (pivot below threshold)."""


class UncertifiedSystem(RiccatiLabError):
    """Operation requires the controllability/observability certificates."""


class IdentityViolation(RiccatiLabError):
    """An algebraic identity residual exceeded its budget."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class NoConvergence(RiccatiLabError):
    """Fixed-point iteration hit the iteration cap."""

    def __init__(self, max_iter: int, last_iterate, last_diff: float):
        super().__init__(
            f"no convergence after {max_iter} iterations "
            f"(last successive-iterate norm {last_diff:.3e})"
        )
        self.max_iter = max_iter
        self.last_iterate = last_iterate
        self.last_diff = last_diff


class SpectralCertificateFailure(RiccatiLabError):
    """Closed-loop spectral radius >= 1 after convergence."""

    def __init__(self, rho: float, which: str = "E"):
        super().__init__(f"spectral radius of {which} is {rho:.12g} >= 1")
        self.rho = rho
        self.which = which


class Divergence(RiccatiLabError):
    """Series terms stopped decreasing; spectral radius >= 1 suspected."""


class SingularA(RiccatiLabError):
    """Operation requires an invertible drift matrix."""


class InvalidHorizon(RiccatiLabError):
    """Horizon below the dimension: the factorization is not guaranteed."""


class SingularL(RiccatiLabError):
    """The linear factor failed to invert at a horizon where it must."""


class ScanExhausted(RiccatiLabError):
    """Dominance horizon scan hit its cap."""


class BoundViolation(RiccatiLabError):
    """A certified uniform bound failed; carries the offending report."""

    def __init__(self, message: str, report):
        super().__init__(message)
        self.report = report
