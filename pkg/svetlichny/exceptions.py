"""Exceptions raised by the svetlichny package."""


class SvetlichnyError(Exception):
    """Base class for all errors raised by svetlichny."""


class ZeroNormError(SvetlichnyError, ValueError):
    """Amplitude vector has zero norm and cannot be normalized."""


class InvalidSettingError(SvetlichnyError, ValueError):
    """Measurement setting, observable or scenario violates its invariants."""


class InputError(SvetlichnyError, ValueError):
    """Argument to an analysis routine is malformed (weights, shots, tolerances, menus...)."""


class ConsistencyError(SvetlichnyError, ArithmeticError):
    """A quantity that must be real carries an imaginary residue above tolerance."""


class SolverError(SvetlichnyError, RuntimeError):
    """The linear program did not terminate within its iteration cap."""


class ConfigError(SvetlichnyError, ValueError):
    """Run configuration could not be parsed.

    The message is prefixed with the source and line (``path:line:``) and names the offending field.
    """

    def __init__(self, message: str, source: str = None, line: int = None, field: str = None):
        """Init method for ConfigError."""
        self.source = source
        self.line = line
        self.field = field

        prefix = ""
        if source is not None:
            prefix = f"{source}:{line}: " if line is not None else f"{source}: "
        if field is not None:
            prefix += f"field '{field}': "

        super().__init__(prefix + message)
