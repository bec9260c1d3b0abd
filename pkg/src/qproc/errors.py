class QprocError(Exception):
    """Base class for errors raised by qproc."""


class InputError(QprocError, ValueError):
    """Malformed or degenerate input data."""


class ReconstructionError(QprocError):
    """No physical channel could be produced from the data."""
