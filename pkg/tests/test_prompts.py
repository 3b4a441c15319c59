"""
Unit Tests for Box Prompts (prompts/boxes.py)
"""

import numpy as np
import pytest

from prompts import (
    BoundingBox,
    bounding_box_from_mask,
    bounding_boxes_per_component,
    full_patch_box,
    normalize_box,
)
from utils.errors import EmptyMaskError, ValidationError


def random_blob(seed, size=64):
    """Seeded union of a few random rectangles"""
    rng = np.random.default_rng(seed)
    mask = np.zeros((size, size), dtype=np.uint8)
    for _ in range(3):
        top, left = rng.integers(0, size - 8, 2)
        height, width = rng.integers(2, 8, 2)
        mask[top : top + height, left : left + width] = 1
    return mask


class TestBoundingBoxFromMask:
    """
    Test Suite for bounding_box_from_mask
    """

    def test_single_pixel(self):
        """Pixel at row 5, col 7 gives (7, 5, 7, 5)"""
        mask = np.zeros((16, 16), dtype=np.uint8)
        mask[5, 7] = 1

        assert bounding_box_from_mask(mask).as_tuple() == (7, 5, 7, 5)

    def test_full_mask(self):
        mask = np.ones((256, 256), dtype=np.uint8)

        assert bounding_box_from_mask(mask).as_tuple() == (0, 0, 255, 255)

    def test_blob_matches_coordinate_scan(self):
        """The tight box equals min/max of a brute-force scan of foreground coordinates"""
        mask = random_blob(11)
        coordinates = [(r, c) for r in range(mask.shape[0]) for c in range(mask.shape[1]) if mask[r, c]]
        rows = [r for r, _ in coordinates]
        cols = [c for _, c in coordinates]

        box = bounding_box_from_mask(mask)

        assert box.as_tuple() == (min(cols), min(rows), max(cols), max(rows))

    def test_tight_box_is_minimal(self):
        """Shrinking any side by one pixel loses foreground"""
        mask = random_blob(5)
        box = bounding_box_from_mask(mask)

        assert mask[:, box.x_min].any() and mask[:, box.x_max].any()
        assert mask[box.y_min, :].any() and mask[box.y_max, :].any()

    @pytest.mark.parametrize("seed", range(20))
    def test_jittered_box_contains_foreground_and_stays_inside(self, seed):
        mask = random_blob(seed)
        tight = bounding_box_from_mask(mask)

        box = bounding_box_from_mask(mask, jitter=6, seed=seed)

        box.validate(*mask.shape)
        assert box.x_min <= tight.x_min and box.y_min <= tight.y_min
        assert box.x_max >= tight.x_max and box.y_max >= tight.y_max
        assert box.x_min >= tight.x_min - 6 and box.x_max <= tight.x_max + 6

    def test_jitter_is_seeded(self):
        mask = random_blob(2)

        first = bounding_box_from_mask(mask, jitter=4, seed=13)
        second = bounding_box_from_mask(mask, jitter=4, seed=13)

        assert first == second

    def test_empty_mask(self):
        with pytest.raises(EmptyMaskError):
            bounding_box_from_mask(np.zeros((8, 8), dtype=np.uint8))

    def test_negative_jitter(self):
        with pytest.raises(ValidationError):
            bounding_box_from_mask(np.ones((4, 4)), jitter=-1)


class TestPerComponentBoxes:
    """Per-object boxes"""

    def test_two_components(self):
        mask = np.zeros((32, 32), dtype=np.uint8)
        mask[2:5, 3:9] = 1
        mask[20:30, 15:18] = 1

        results = bounding_boxes_per_component(mask)

        boxes = sorted(box.as_tuple() for box, _ in results)
        assert boxes == [(3, 2, 8, 4), (15, 20, 17, 29)]
        assert sum(component.sum() for _, component in results) == mask.sum()

    def test_diagonal_pixels_are_one_component(self):
        """Components are 8-connected"""
        mask = np.eye(5, dtype=np.uint8)

        assert len(bounding_boxes_per_component(mask)) == 1


class TestFullPatchBox:
    """full_patch_box axis convention"""

    @pytest.mark.parametrize(
        "height,width,expected",
        [(256, 256, (0, 0, 255, 255)), (1, 1, (0, 0, 0, 0)), (64, 128, (0, 0, 127, 63))],
    )
    def test_extent(self, height, width, expected):
        assert full_patch_box(height, width).as_tuple() == expected


class TestBoxValidation:
    """BoundingBox invariants and normalisation"""

    def test_outside_patch(self):
        with pytest.raises(ValidationError):
            BoundingBox(0, 0, 256, 10).validate(256, 256)

    def test_inverted_box(self):
        with pytest.raises(ValidationError):
            BoundingBox(10, 0, 5, 10).validate(256, 256)

    def test_full_box_normalizes_to_unit_corners(self):
        corners = normalize_box(full_patch_box(256, 256), 256, 256)

        assert np.array_equal(corners, [[0.0, 0.0], [1.0, 1.0]])
