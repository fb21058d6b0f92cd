"""Exception types shared across the package."""


class SkybeamError(Exception):
    """Base class for package-specific failures."""


class ConfigError(SkybeamError, ValueError):
    """A configuration value violates its constraints."""


class DimensionMismatchError(SkybeamError, ValueError):
    """Vector/matrix operands have incompatible shapes."""


class DomainError(SkybeamError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class SingularGeometryError(DomainError):
    """Geometry is degenerate (zero range, coincident points, ...)."""


class TargetUnobservableError(SkybeamError):
    """Echo SNR is zero; delay/Doppler noise variance would be infinite."""


class NumericalFailureError(SkybeamError):
    """A linear solve is too ill-conditioned to trust."""


class ConstraintViolationError(SkybeamError, ValueError):
    """An assignment is not a bijection."""


class DegenerateFeatureError(SkybeamError, ValueError):
    """A feature vector is zero; cosine similarity is undefined."""
