"""Exception and warning types shared across the package."""


class ConfigError(ValueError):
    """Malformed or unreadable configuration input."""


class ValidationError(ConfigError):
    """A constructed object violates one of its invariants.

    The message names the owning type and the first violated invariant.
    """


class PolarError(ValueError):
    """Solar geometry undefined: the site is in polar day/night for this date."""


class OverloadError(ValueError):
    """Requested per-server utilization exceeds the configured ceiling."""


class StabilityError(ValueError):
    """Queue arrival rate at or above the service rate; no steady state."""


class LinkRateError(ValueError):
    """Offloading link rate is zero or negative where a positive rate is required."""


class NumericsError(ArithmeticError):
    """A series or iteration failed to converge; message carries the inputs."""


class LinkSaturationWarning(UserWarning):
    """Offered traffic exceeds link capacity (duty cycle above one)."""
