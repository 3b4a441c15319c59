"""Segmentation quality metrics"""

from .scores import iou, dice, mae, overlap_counts
from .report import ImageScore, MetricsReport, evaluate_set

__all__ = [
    "iou",
    "dice",
    "mae",
    "overlap_counts",
    "ImageScore",
    "MetricsReport",
    "evaluate_set",
]
