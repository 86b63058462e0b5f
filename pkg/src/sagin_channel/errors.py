"""Exception types shared across the package."""


class SaginError(Exception):
    """Base class for all errors raised by sagin_channel."""


class InvalidArgumentError(SaginError, ValueError):
    """An argument is outside the documented domain of an operation."""


class DomainError(SaginError, ArithmeticError):
    """A numerical evaluation left its mathematical domain.

    Raised for logarithmic singularities, non-positive radicands inside the
    ray integrals, arcsin arguments outside [-1, 1], and similar cases.
    """


class ConvergenceError(DomainError):
    """An iterative evaluation did not converge within its term budget."""


class ConfigError(SaginError):
    """A scenario or coefficient file failed to parse or validate.

    ``path`` is the dotted key path inside the file and ``line`` the 1-based
    source line, when known.
    """

    def __init__(self, message, *, source=None, path=None, line=None):
        self.source = source
        self.path = path
        self.line = line
        where = []
        if source is not None:
            where.append(str(source) if line is None else f"{source}:{line}")
        elif line is not None:
            where.append(f"line {line}")
        if path:
            where.append(path)
        prefix = f"{' '.join(where)}: " if where else ""
        super().__init__(prefix + message)
