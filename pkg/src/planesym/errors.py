"""Exception types shared across the package."""


class PlanesymError(Exception):
    """Base class for all planesym errors."""


class NonOrthogonalError(PlanesymError):
    """Linear part of an isometry deviates from orthogonality beyond tolerance."""


class IncompatibleLatticeError(PlanesymError):
    """Lattice class does not support the requested wallpaper group."""


class FDShapeMismatchError(PlanesymError):
    """Fundamental-domain image does not cover the group's FD polygon."""


class CanvasTooSmallError(PlanesymError):
    """Requested canvas holds less than one unit cell."""


class InconsistentSchemeError(PlanesymError):
    """Color-permutation assignment fails the homomorphism check."""


class SizeMismatchError(PlanesymError):
    """Pattern canvases are incompatible after registration."""


class NoPeriodicityError(PlanesymError):
    """No translation symmetry found below the acceptance threshold."""


class InsufficientOverlapError(PlanesymError):
    """Transformed overlap region covers too little of the canvas."""


class AnchorNotFoundError(PlanesymError):
    """No anchor satisfying the group's proper-cell rules was detected."""


class UnknownTaskError(PlanesymError):
    """Response references a task id absent from the task set."""


class UnknownOptionError(PlanesymError):
    """Response selects an ornament that is not among the task options."""


class MismatchedOptionsError(PlanesymError):
    """Rankings being compared cover different option sets."""


class ZeroParticipantsError(PlanesymError):
    """Similarity computation requires a positive participant count."""


class DegenerateInputError(PlanesymError):
    """Embedding input carries no usable structure (all distances equal)."""


class PerplexityTooLargeError(PlanesymError):
    """Perplexity exceeds (k - 1) / 3 for a k-point input."""


class SchemaError(PlanesymError):
    """Input file violates the expected schema."""
