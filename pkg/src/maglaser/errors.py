"""Exception hierarchy shared across the scanner twin.

Every error the CLI can exit on carries a short category string so shell
callers can branch on it without parsing prose.
"""


class MaglaserError(Exception):
    """Base class for all scanner-twin errors."""

    category = "error"


class DomainError(MaglaserError):
    """Non-finite or otherwise physically meaningless input."""

    category = "domain"


class GeometryError(MaglaserError):
    """Inconsistent geometric configuration (e.g. non-coaxial coil pair)."""

    category = "geometry"


class ConfigError(MaglaserError):
    """Bad configuration value or unreadable config file."""

    category = "config"


class ValidationError(MaglaserError):
    """Input data violates an operation's preconditions."""

    category = "validation"


class SaturationError(MaglaserError):
    """Commanded current beyond the hardware limit.

    Carries the value the hardware would have clamped to, so callers can
    decide whether to proceed with the clamped command.
    """

    category = "saturation"

    def __init__(self, message, clamped):
        super().__init__(message)
        self.clamped = clamped


class WorkspaceExceededError(MaglaserError):
    """Fiber deflection beyond the soft clamp; refusing to continue."""

    category = "workspace"


class OutOfFrameError(MaglaserError):
    """Spot lies outside the synthetic camera's field of view."""

    category = "frame"


class NoSpotError(MaglaserError):
    """No pixel above the detection threshold."""

    category = "no-spot"


class SequencingError(MaglaserError):
    """Timestamps or sequence numbers out of order."""

    category = "sequencing"


class BusyError(MaglaserError):
    """Mode transition requested while another mode is still active."""

    category = "busy"
