"""Exceptions shared across the package."""


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


class CapExceeded(RuntimeError):
    """A resource cap (vertex count, eigensolve size) was exceeded (CLI exit code 3)."""


class InvariantBreach(RuntimeError):
    """An internal structural invariant failed where it never should (CLI exit code 4)."""
