"""Exception hierarchy.

Two families matter to the command line: data/validation problems (exit code 1)
and numerical failures (exit code 2).
"""


class EcobenchError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(EcobenchError):
    """Input data or configuration violates a documented invariant."""


class NumericalError(EcobenchError):
    """A computation could not produce a trustworthy result."""


# ingest
class MalformedRow(ValidationError):
    pass


class NegativeValue(ValidationError):
    pass


class EmptyTable(ValidationError):
    pass


class NonPositiveIndicator(ValidationError):
    pass


class DuplicateCountry(ValidationError):
    pass


class UnknownGroupLabel(ValidationError):
    pass


class UnknownClassLabel(ValidationError):
    pass


class EmptyPanel(ValidationError):
    pass


# complexity
class ZeroCountryTotal(ValidationError):
    pass


class AllZeroMatrix(ValidationError):
    pass


class ZeroVariance(NumericalError):
    pass


class DegenerateMembership(NumericalError):
    pass


# dea / lp
class NonFiniteValue(ValidationError):
    pass


class NumericalBreakdown(NumericalError):
    pass


# similarity
class EmptySelection(ValidationError):
    pass


class ConstantVector(ValidationError):
    pass


class UnclassifiedProduct(ValidationError):
    pass


# networks
class TargetUnreachable(NumericalError):
    pass


class NoPartners(NumericalError):
    pass


# pipeline
class UnwritableDirectory(ValidationError):
    pass


class StageError(EcobenchError):
    """Wraps an error raised inside a pipeline stage.

    ``stage`` names the stage and ``cause`` is the original exception, which
    also decides the exit code.
    """

    def __init__(self, stage: str, cause: BaseException, entity: str | None = None):
        self.stage = stage
        self.cause = cause
        self.entity = entity
        where = f" ({entity})" if entity else ""
        super().__init__(f"[{stage}]{where} {type(cause).__name__}: {cause}")
