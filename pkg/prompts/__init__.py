"""Box prompts"""

from .boxes import (
    BoundingBox,
    bounding_box_from_mask,
    bounding_boxes_per_component,
    full_patch_box,
    normalize_box,
)

__all__ = [
    "BoundingBox",
    "bounding_box_from_mask",
    "bounding_boxes_per_component",
    "full_patch_box",
    "normalize_box",
]
