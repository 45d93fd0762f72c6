"""Exception types shared across the package."""


class PebblelogError(Exception):
    """Base class for all errors raised by pebblelog."""


class SignatureMismatch(PebblelogError, ValueError):
    pass


class StructureError(PebblelogError, ValueError):
    """A structure violates one of its invariants."""


class ParseError(PebblelogError, ValueError):
    """Malformed input text. Carries 1-based line and column."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class BudgetExceeded(PebblelogError, RuntimeError):
    """A computation would exceed its configured size budget.

    ``bound`` is the count that was about to be violated and ``limit`` the
    budget in force.
    """

    def __init__(self, what, bound, limit):
        self.what = what
        self.bound = bound
        self.limit = limit
        super().__init__(f"{what}: {bound} exceeds budget {limit}")


class UnsupportedError(PebblelogError, ValueError):
    pass


class ProgramError(PebblelogError, ValueError):
    """A Datalog program is ill-formed (unsafe rule, undeclared symbol, ...)."""
