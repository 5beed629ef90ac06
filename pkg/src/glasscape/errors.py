"""Exception hierarchy shared by all glasscape modules.

The CLI maps these onto process exit codes: usage errors exit 1, numeric
failures exit 2, precondition violations exit 3, resource caps exit 4.
"""


class GlasscapeError(Exception):
    """Base class for all library errors."""


class PreconditionError(GlasscapeError):
    """An operation was called outside its stated domain.

    Covers pure mixtures passed where a mixed one is required, parameters
    outside their range (|r| >= 1, k > 4, x below a domain edge), and
    temperatures below a transition.
    """


class DegenerateCovarianceError(PreconditionError):
    """A covariance matrix required to be invertible is singular.

    Raised for pure mixtures, whose (H, dH/dR) covariance is rank one on
    every sphere; callers must route to the one-dimensional pure forms.
    """


class OutOfRegimeError(PreconditionError):
    """A formula was requested outside the regime where it is exact."""


class NumericFailureError(GlasscapeError):
    """A solver failed to bracket or converge."""


class ResourceCapError(GlasscapeError):
    """A requested simulation exceeds the configured memory cap."""
