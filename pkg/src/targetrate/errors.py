"""Exception types shared across the package."""


class DomainError(ValueError):
    """Invalid input: a value outside the domain of an operation.

    ``field`` names the offending input so callers (the CLI in particular)
    can produce a one-line diagnostic.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class ConvergenceError(RuntimeError):
    """An iterative routine failed to converge on a valid input."""
