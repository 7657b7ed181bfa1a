"""Exception hierarchy shared by the library and the CLI."""


class SigKernelsError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SigKernelsError, ValueError):
    """Invalid configuration: unknown kernel family, bad parameter, etc."""


class DataError(SigKernelsError, ValueError):
    """Malformed or inconsistent input data (files, sequences, datasets)."""


class NumericalGuardError(SigKernelsError, RuntimeError):
    """A size/memory guard tripped before an instance could run away."""
