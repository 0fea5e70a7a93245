"""Exception types shared across the package."""


class ScalableMeasuresError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(ScalableMeasuresError, ValueError):
    pass


class DomainError(ScalableMeasuresError, ValueError):
    pass


class SingularInputError(ScalableMeasuresError, ZeroDivisionError):
    """A closed form was asked to divide by ``d1 - 1`` (or ``d1**2 - 1``).

    The recurrence in :mod:`scalable_measures.series` has no such
    singularity and should be used instead.
    """


class DegreeOverflowError(ScalableMeasuresError, OverflowError):
    pass


class SizeLimitError(ScalableMeasuresError, MemoryError):
    pass


class ValidationError(ScalableMeasuresError, ValueError):
    """A density matrix failed one of its invariants.

    ``invariant`` names the violated condition (``"shape"``,
    ``"hermitian"``, ``"unit-trace"``, ``"psd"`` or ``"finite"``).
    """

    def __init__(self, invariant, message):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class ConfigError(ScalableMeasuresError, ValueError):
    """Bad suite configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
