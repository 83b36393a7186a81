"""Exception types shared across the package."""


class LatticeError(Exception):
    """Base class for lattice computation failures."""


class DegenerateBasisError(LatticeError):
    """Basis rows are numerically dependent or too ill-conditioned to trust."""


class BudgetExceededError(LatticeError):
    """An enumeration visited more nodes than its budget allows.

    This is a hard error rather than a truncation: completeness claims made
    by the callers would silently degrade otherwise.
    """


class LatticeParseError(LatticeError):
    """A lattice text file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvariantViolationError(LatticeError):
    """An internal consistency check failed; results cannot be trusted."""
