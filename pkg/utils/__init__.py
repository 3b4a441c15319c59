"""Utilities module"""

from .errors import (
    RockSegError,
    ValidationError,
    ShapeError,
    CoverageError,
    EmptyMaskError,
    DegenerateHistogramError,
    EmptyDatasetError,
    ImageFormatError,
    LayoutError,
    IncompatibilityError,
    ChecksumError,
    DivergenceError,
    MissingWeightsError,
    PartialFailureError,
)
from .decorators import handle_errors, validate_paths
from .manifest import (
    build_manifest,
    write_manifest,
    read_manifest,
    sha256_hash,
    sha256_file,
    md5_file,
)

__all__ = [
    "RockSegError",
    "ValidationError",
    "ShapeError",
    "CoverageError",
    "EmptyMaskError",
    "DegenerateHistogramError",
    "EmptyDatasetError",
    "ImageFormatError",
    "LayoutError",
    "IncompatibilityError",
    "ChecksumError",
    "DivergenceError",
    "MissingWeightsError",
    "PartialFailureError",
    "handle_errors",
    "validate_paths",
    "build_manifest",
    "write_manifest",
    "read_manifest",
    "sha256_hash",
    "sha256_file",
    "md5_file",
]
