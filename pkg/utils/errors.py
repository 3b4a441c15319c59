"""
Error types shared by the pipeline

Every error carries a string code (logged) and the process exit code a command
returns when the error reaches the command boundary.
"""

from constants import ExitCode


class RockSegError(Exception):
    """Base error for the segmentation pipeline"""

    code = "INTERNAL_ERROR"
    exit_code = ExitCode.UNEXPECTED

    def __init__(self, message, details=None):
        super().__init__(message)
        self.message = message
        self.details = details if details is not None else {}


class ValidationError(RockSegError, ValueError):
    code = "INVALID_PARAM"
    exit_code = ExitCode.VALIDATION


class ShapeError(ValidationError):
    code = "SHAPE_MISMATCH"


class CoverageError(ValidationError):
    code = "ZERO_BLEND_WEIGHT"


class EmptyMaskError(ValidationError):
    code = "EMPTY_MASK"


class DegenerateHistogramError(ValidationError):
    code = "DEGENERATE_HISTOGRAM"


class EmptyDatasetError(ValidationError):
    code = "EMPTY_DATASET"


class ImageFormatError(RockSegError):
    code = "IMAGE_FORMAT"
    exit_code = ExitCode.IO


class LayoutError(RockSegError):
    code = "DATASET_LAYOUT"
    exit_code = ExitCode.LAYOUT


class IncompatibilityError(RockSegError):
    code = "INCOMPATIBLE"
    exit_code = ExitCode.INCOMPATIBLE


class ChecksumError(IncompatibilityError):
    code = "CHECKSUM_MISMATCH"


class DivergenceError(RockSegError):
    code = "DIVERGED"
    exit_code = ExitCode.DIVERGENCE


class MissingWeightsError(RockSegError):
    code = "MISSING_WEIGHTS"
    exit_code = ExitCode.MISSING_WEIGHTS


class PartialFailureError(RockSegError):
    """Some inputs of a batch command failed while others succeeded"""

    code = "PARTIAL_FAILURE"
    exit_code = ExitCode.PARTIAL_FAILURE
