"""Exception types shared across the package."""


class AdialabError(Exception):
    """Base class for all library-specific failures."""


class DomainError(AdialabError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class IntegrityError(AdialabError):
    """A value violates a structural invariant (e.g. a non-Hermitian matrix)."""


class NumericalError(AdialabError):
    """A numerical routine failed or produced an untrustworthy result."""


class NumericalInstabilityError(NumericalError):
    """State-norm drift exceeded the per-step renormalization guard."""


class GapCollapseError(NumericalError):
    """The tracked eigenvalue became (near-)degenerate somewhere on the grid."""


class UnderResolvedGridError(NumericalError):
    """Consecutive eigenpath samples overlap too little to identify the branch."""


class NonConvergenceError(NumericalError):
    """An adaptive refinement loop hit its ceiling before reaching tolerance."""


class FeasibilityError(AdialabError):
    """The requested computation exceeds the configured resource ceilings."""


class ConfigError(AdialabError):
    """A run configuration file is malformed or inconsistent."""
