"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class ContractError(ValueError):
    """An input object violates a documented precondition (norm, shell, ...)."""


class OrientationError(RuntimeError):
    """Orientation or principal axis is undefined for the given state/grid."""
