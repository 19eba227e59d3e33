"""Exception types shared across the toolkit."""


class BerkresError(Exception):
    """Base class for all toolkit errors."""


class ConfigMismatchError(BerkresError):
    """Operands belong to different field configurations."""


class ParseError(BerkresError):
    """Malformed expression, scalar literal, or point literal."""


class DegenerateMapError(BerkresError):
    """Pair of forms with zero resultant (not a rational map)."""


class DegreeCapError(BerkresError):
    """Iteration would exceed the configured degree cap."""


class EnlargeRamificationError(BerkresError):
    """The requested radius exponent needs a larger ramification index e."""


class IrrationalDirectionError(BerkresError):
    """A residue factor of degree > 1 appeared over the Laurent backend."""


class UnliftableDirectionError(BerkresError):
    """Direction tag lives in a residue extension with no center lift."""


class IterationCapError(BerkresError):
    """A bounded search loop exceeded its safety cap."""


class ProbeStabilizationError(BerkresError):
    """Tangent probe failed to stabilize within the step ladder."""


class ConsistencyError(BerkresError):
    """Two independent computations of the same quantity disagreed."""
