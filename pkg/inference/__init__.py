"""Tiled inference"""

from .predictor import predict_patch, predict_patches, binarize, segment_image
from .writers import write_outputs

__all__ = [
    "predict_patch",
    "predict_patches",
    "binarize",
    "segment_image",
    "write_outputs",
]
