"""Exception hierarchy.

Everything raised deliberately by the package derives from ``CkdBenchError``.
``DataError`` covers problems with input files or their contents and maps to
exit code 3 in the CLI.
"""


class CkdBenchError(Exception):
    pass


class DataError(CkdBenchError):
    pass


class ConfigError(CkdBenchError):
    pass


# dataset_io
class MalformedHeader(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyData(DataError):
    pass


class DomainViolation(DataError):
    def __init__(self, message, row=None, attribute=None):
        self.row = row
        self.attribute = attribute
        super().__init__(message)


class LabelMissing(DataError):
    pass


class TypeMismatch(DataError):
    pass


class BadSpec(CkdBenchError):
    pass


# preprocess
class AllMissingForClass(DataError):
    pass


class PlanGap(DataError):
    pass


class ResidualMissing(DataError):
    pass


class DimensionMismatch(CkdBenchError, ValueError):
    pass


# numkernel
class TooFewSamples(CkdBenchError, ValueError):
    pass


class NotPositiveDefinite(CkdBenchError, ArithmeticError):
    pass


# classifiers
class DegenerateData(CkdBenchError):
    pass


class NonFiniteLoss(CkdBenchError, ArithmeticError):
    def __init__(self, message, epoch=None):
        self.epoch = epoch
        super().__init__(message)


class KTooLarge(CkdBenchError, ValueError):
    pass


# evaluation
class BadK(CkdBenchError, ValueError):
    pass


class LengthMismatch(CkdBenchError, ValueError):
    pass


class EmptyMatrix(CkdBenchError, ValueError):
    pass


class FoldError(CkdBenchError):
    """A fit/predict failure annotated with the fold it happened in."""

    def __init__(self, fold, cause):
        self.fold = fold
        self.cause = cause
        super().__init__(f"fold {fold}: {type(cause).__name__}: {cause}")
