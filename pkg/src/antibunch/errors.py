"""Exception types shared across the package."""


class AntibunchError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(AntibunchError):
    """Invalid configuration value; carries the offending field path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class StackFormatError(AntibunchError):
    """Frame-stack file is corrupt, truncated, or has an unsupported version."""


class MapFormatError(AntibunchError):
    """Correlation-map file is corrupt or has an unsupported version."""


class MemoryBudgetError(AntibunchError):
    """Requested stack would exceed the configured memory budget."""


class DigestMismatchError(AntibunchError):
    """Inputs come from different runs (config digests disagree)."""


class StatsError(AntibunchError):
    """A statistical precondition failed (too little data, no signal)."""


class NoSignificantPeakError(StatsError):
    """Map has no peak above the robust noise floor."""


class FitConvergenceError(StatsError):
    """Peak fit did not converge within the iteration limit."""
