# denjoy_invariants/errors.py

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNDECIDED = 2
EXIT_BUDGET = 3


class DenjoyError(Exception):
    """Base class for every error raised by the package."""

    exit_code = EXIT_USAGE


class PositionedError(DenjoyError):
    """An error tied to a 1-based line/column of a source document; 0 means unknown."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{where}{message}")


class SpecParseError(PositionedError):
    pass


class InvalidActionError(PositionedError):
    """The document parses but describes no valid action."""


class DomainError(DenjoyError):
    """A precondition of an operation is violated (odd Pfaffian, unknown label, ...)."""


class UndecidedError(DenjoyError):
    exit_code = EXIT_UNDECIDED

    def __init__(self, message: str, precision_bits: int):
        self.precision_bits = precision_bits
        super().__init__(f"{message} (undecided at {precision_bits} bits)")


class BudgetExceededError(DenjoyError):
    exit_code = EXIT_BUDGET

    def __init__(self, message: str, achieved_width, budget: int):
        self.achieved_width = achieved_width
        self.budget = budget
        super().__init__(f"{message}; enumeration budget {budget}, achieved width {achieved_width}")
