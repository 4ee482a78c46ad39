"""Exception hierarchy shared by all flexcycle modules."""


class FlexcycleError(Exception):
    """Base class for every error raised by flexcycle."""


class SkeletonError(FlexcycleError, ValueError):
    """Combinatorial input is malformed or violates a precondition."""


class DegenerateError(FlexcycleError, ValueError):
    """A realization collapses an edge or a triangle."""


class FlipError(SkeletonError):
    """A flip cannot be performed on the requested edge."""


class FlexError(FlexcycleError):
    """Base class for failures of flex tracing."""


class RigidError(FlexError):
    """The framework admits no infinitesimal flex."""


class HigherDimensionalFlexError(FlexError):
    """The tangent space has dimension > 1, so no unique branch exists."""


class BranchPointError(FlexError):
    """The kernel dimension changed while tracing."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class CorrectorDivergenceError(FlexError):
    """The corrector failed even at the smallest allowed step."""

    def __init__(self, message, parameter=None):
        super().__init__(message)
        self.parameter = parameter


class InsufficientSamplesError(FlexError, ValueError):
    """Constancy tests need at least two samples."""


class ProjectiveError(FlexcycleError, ValueError):
    """Invalid projective data (zero vector, exceptional point, ...)."""


class InconsistentLengthsError(ProjectiveError):
    """Supplied lengths do not match the signed lengths on Fin_p."""


class NonRealSignedLengthError(ProjectiveError):
    """A signed length has a non-negligible imaginary part."""


class ColoringError(FlexcycleError, ValueError):
    """A coloring or walk seed is invalid."""


class AcyclicWalkError(ColoringError):
    """The red walk contains no cycle through the requested edge."""


class FormatError(FlexcycleError, ValueError):
    """An input file could not be parsed; the message names the line or field."""
