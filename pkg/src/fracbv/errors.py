"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Malformed configuration (CLI arguments, config dicts)."""


class NumericsError(RuntimeError):
    """A numerical procedure failed: escaped bracket, non-convergence, NaN."""
