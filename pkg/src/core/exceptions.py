"""
Error hierarchy for the GFMM Mixed-Attribute Toolkit
"""

from typing import Any, Optional


class GfmmToolkitError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(GfmmToolkitError):
    """Problem with a schema or with data that does not conform to it."""

    def __init__(self, message: str, column: Optional[str] = None, row: Optional[int] = None):
        self.column = column
        self.row = row
        location = []
        if column is not None:
            location.append(f"column '{column}'")
        if row is not None:
            location.append(f"row {row}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class MissingColumn(SchemaError):
    pass


class ArityMismatch(SchemaError):
    pass


class NumericParseError(SchemaError):
    pass


class MissingCell(SchemaError):
    pass


class UnknownCategoryError(SchemaError):
    pass


class SchemaFileError(SchemaError):
    pass


class TooFewSamples(GfmmToolkitError):
    pass


class EncoderError(GfmmToolkitError):
    pass


class EmptyDomain(EncoderError):
    pass


class MissingLabels(EncoderError):
    pass


class DimensionMismatch(GfmmToolkitError):
    pass


class StackingError(GfmmToolkitError):
    pass


class NoNumericFeatures(StackingError):
    pass


class NoCategoricalFeatures(StackingError):
    pass


class StatisticsError(GfmmToolkitError):
    pass


class EmptyMatrix(StatisticsError):
    pass


class DegenerateRanks(StatisticsError):
    pass


class UnsupportedAlpha(StatisticsError):
    pass


class DiagramWriteError(GfmmToolkitError):
    pass


class ModelFormatError(GfmmToolkitError):
    pass


class ConfigError(GfmmToolkitError):
    pass


class MissingDataset(GfmmToolkitError):
    pass


class ExperimentCellError(GfmmToolkitError):
    """Failure inside one grid cell, carrying the cell and fold that failed."""

    def __init__(self, cell: Any, fold: Optional[int], cause: BaseException):
        self.cell = cell
        self.fold = fold
        self.cause = cause
        where = f"cell {cell}" if fold is None else f"cell {cell}, fold {fold}"
        super().__init__(f"{where}: {type(cause).__name__}: {cause}")

    def __reduce__(self):
        return self.__class__, (self.cell, self.fold, self.cause)
