"""Exception types shared across the package.

The CLI maps these onto exit codes: ``ValueError`` (bad arguments) -> 2,
``CapacityError`` -> 3, ``InvariantError`` -> 4.
"""


class CapacityError(ValueError):
    """A size parameter exceeds the configured ceiling."""


class DirectionError(ValueError):
    """Operand rounding directions cannot certify the requested result side."""


class InvariantError(RuntimeError):
    """An internal consistency check failed; results must not be trusted."""
