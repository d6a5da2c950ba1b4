"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end:
2 for usage/config problems, 3 for data problems, 4 for numeric/training
problems.
"""


class EnercastError(Exception):
    exit_code = 1


class ConfigError(EnercastError):
    exit_code = 2


class DataError(EnercastError):
    exit_code = 3


class ParseError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ContinuityError(DataError):
    pass


class RecordValidationError(DataError):
    def __init__(self, message, field=None, row=None):
        self.field = field
        self.row = row
        super().__init__(message)


class FitError(DataError):
    pass


class FeaturizeError(DataError):
    pass


class GenerationError(DataError):
    pass


class ScenarioError(DataError):
    pass


class PairingError(DataError):
    pass


class DomainError(DataError):
    """A metric was asked to divide by a zero actual value."""


class PlanError(DataError):
    pass


class AggregationError(DataError):
    pass


class AlignmentError(DataError):
    pass


class ModelFileError(DataError):
    pass


class ShapeError(DataError):
    pass


class NumericError(EnercastError):
    exit_code = 4


class TrainingDivergedError(NumericError):
    def __init__(self, epoch):
        self.epoch = epoch
        super().__init__(f"training diverged at epoch {epoch} (non-finite loss)")


class FoldError(NumericError):
    def __init__(self, fold_index, cause):
        self.fold_index = fold_index
        self.cause = cause
        super().__init__(f"fold {fold_index}: {cause}")
