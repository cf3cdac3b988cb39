"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration or input validation failure."""


class SingularityError(ValueError):
    """Evaluation point too close to a point source.

    Carries ``sample_index`` (a grid multi-index or flat index) when the
    offending point came from a grid evaluation, else ``None``.
    """

    def __init__(self, message, sample_index=None):
        super().__init__(message)
        self.sample_index = sample_index


class MetricsError(ValueError):
    """A field metric could not be extracted (degenerate grid, unresolved
    profile, region outside the grid, ...)."""
