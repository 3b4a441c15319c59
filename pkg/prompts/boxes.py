"""
Box prompts derived from ground-truth masks

Boxes are (x_min, y_min, x_max, y_max) with inclusive pixel coordinates,
x along columns and y along rows.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from utils.errors import EmptyMaskError, ValidationError

logger = logging.getLogger(__name__)

# 8-connectivity for the per-component mode
_CONNECTIVITY = np.ones((3, 3), dtype=int)


@dataclass(frozen=True)
class BoundingBox:
    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def validate(self, height, width):
        """Check the box lies inside a height x width patch"""
        if not (0 <= self.x_min <= self.x_max < width):
            raise ValidationError(f"Box {self} is outside width {width}")
        if not (0 <= self.y_min <= self.y_max < height):
            raise ValidationError(f"Box {self} is outside height {height}")
        return self

    def as_array(self):
        return np.array([self.x_min, self.y_min, self.x_max, self.y_max], dtype=np.int64)

    def as_tuple(self):
        return (self.x_min, self.y_min, self.x_max, self.y_max)

    @classmethod
    def from_sequence(cls, values):
        x_min, y_min, x_max, y_max = (int(value) for value in values)
        return cls(x_min, y_min, x_max, y_max)


def _tight_box(rows, cols):
    return int(cols.min()), int(rows.min()), int(cols.max()), int(rows.max())


def _jittered(tight, jitter, height, width, rng):
    x_min, y_min, x_max, y_max = tight
    if jitter > 0:
        # Each side moves outward independently
        dx0, dy0, dx1, dy1 = rng.integers(0, jitter + 1, size=4)
        x_min, y_min = x_min - int(dx0), y_min - int(dy0)
        x_max, y_max = x_max + int(dx1), y_max + int(dy1)
    return BoundingBox(
        max(x_min, 0), max(y_min, 0), min(x_max, width - 1), min(y_max, height - 1)
    )


def bounding_box_from_mask(mask, jitter=0, seed=None):
    """
    Tight box over all foreground pixels, optionally enlarged by random jitter

    Args:
        mask: 2-D binary mask
        jitter: maximum outward displacement of each side, in pixels
        seed: seed or numpy Generator for the jitter

    Raises:
        EmptyMaskError: the mask has no foreground pixel
    """
    if jitter < 0:
        raise ValidationError("jitter must be >= 0")
    mask = np.asarray(mask)
    rows, cols = np.nonzero(mask)
    if rows.size == 0:
        raise EmptyMaskError("Cannot derive a box from an empty mask")
    rng = np.random.default_rng(seed)
    height, width = mask.shape
    return _jittered(_tight_box(rows, cols), jitter, height, width, rng)


def bounding_boxes_per_component(mask, jitter=0, seed=None):
    """
    One box per 8-connected foreground component

    Returns:
        List of (BoundingBox, component mask) in label order
    """
    mask = np.asarray(mask)
    labels, count = ndimage.label(mask > 0, structure=_CONNECTIVITY)
    if count == 0:
        raise EmptyMaskError("Cannot derive boxes from an empty mask")
    rng = np.random.default_rng(seed)
    height, width = mask.shape
    results = []
    for label, window in enumerate(ndimage.find_objects(labels), start=1):
        rows, cols = window
        tight = (cols.start, rows.start, cols.stop - 1, rows.stop - 1)
        component = (labels == label).astype(np.uint8)
        results.append((_jittered(tight, jitter, height, width, rng), component))
    return results


def full_patch_box(height, width):
    """Box covering the whole patch, the prompt used when no mask exists"""
    if height < 1 or width < 1:
        raise ValidationError("height and width must be >= 1")
    return BoundingBox(0, 0, width - 1, height - 1)


def normalize_box(box, height, width):
    """
    Corner coordinates scaled to [0, 1]

    Returns:
        float array [[x_min, y_min], [x_max, y_max]]
    """
    box.validate(height, width)
    scale = np.array(
        [max(width - 1, 1), max(height - 1, 1)], dtype=np.float64
    )
    corners = np.array(
        [[box.x_min, box.y_min], [box.x_max, box.y_max]], dtype=np.float64
    )
    return corners / scale
