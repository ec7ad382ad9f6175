"""Exception types shared across the package."""

from __future__ import annotations


class MecbenchError(Exception):
    """Base class for all package errors."""


class LengthMismatch(MecbenchError):
    """Raw vector length differs from the schema dimension."""

    def __init__(self, expected: int, got: int):
        super().__init__(f"expected {expected} values, got {got}")
        self.expected = expected
        self.got = got


class InadmissibleValue(MecbenchError):
    """A coordinate holds a value outside its admissible set."""

    def __init__(self, index: int, value: object, admissible: tuple):
        super().__init__(f"value {value!r} at index {index} not in admissible set {admissible}")
        self.index = index
        self.value = value
        self.admissible = admissible


class UnknownFeature(MecbenchError):
    """Referenced feature name is absent from the schema."""

    def __init__(self, name: str):
        super().__init__(f"unknown feature {name!r}")
        self.name = name


class SchemaMismatch(MecbenchError):
    """Two objects bound to different schemas were combined."""


class ScheduleError(MecbenchError):
    """A cost schedule violates a structural requirement."""


class ParseError(MecbenchError):
    """Malformed dataset file; reports row and column where possible."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        loc = ""
        if row is not None:
            loc += f" (row {row}"
            loc += f", column {column!r})" if column is not None else ")"
        elif column is not None:
            loc += f" (column {column!r})"
        super().__init__(message + loc)
        self.row = row
        self.column = column


class LabelDomainError(MecbenchError):
    """Label value outside {-1, +1}."""


class InsufficientIntersection(MecbenchError):
    """Cross-model conditioning-set intersection smaller than the requested sample."""

    def __init__(self, have: int, need: int):
        super().__init__(f"intersection holds {have} instances, need {need}")
        self.have = have
        self.need = need


class DegenerateData(MecbenchError):
    """Training or evaluation data contains a single class."""


class EmptyDistribution(MecbenchError):
    """A metric was requested over zero results."""


class AllInfeasible(MecbenchError):
    """Finite-value quantiles requested but every result is infinite."""


class NoSuccessfulTraces(MecbenchError):
    """Concentration statistics requested without any successful trace."""


class ConfigError(MecbenchError):
    """Invalid experiment configuration."""
