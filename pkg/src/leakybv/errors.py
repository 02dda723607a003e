"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operand lengths or qubit counts do not line up."""


class CapacityError(ValueError):
    """A size cap was exceeded.

    ``cap`` names the limit that was hit so the CLI can report it.
    """

    def __init__(self, message: str, cap: str = ""):
        super().__init__(message)
        self.cap = cap


class PositivityError(ValueError):
    """A probability or eigenvalue fell below the negative round-off floor."""
