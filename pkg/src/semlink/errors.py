"""Exception types shared across the package."""


class SemLinkError(Exception):
    """Base class for every error raised by this package."""


class GeometryError(SemLinkError, ValueError):
    """Array shape or size is incompatible with the configured geometry."""


class DataError(SemLinkError, ValueError):
    """Input values are invalid (NaN, Inf, non-binary bits, ...)."""


class DegenerateFrameError(SemLinkError, ValueError):
    """An all-zero frame was given where a normalization is required."""


class CsiUnavailableError(SemLinkError, RuntimeError):
    """Equalization was requested but the receiver has no channel state."""


class FramingError(SemLinkError, ValueError):
    """A bit or symbol stream has a length the next stage cannot frame."""


class ConfigError(SemLinkError, ValueError):
    """Invalid configuration value or inconsistent configuration."""


class VersionError(SemLinkError, ValueError):
    """A file or stream declares a schema this code does not understand."""


class BridgeError(SemLinkError, RuntimeError):
    """The external codec bridge misbehaved (protocol or transport level)."""
