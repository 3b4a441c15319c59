"""
Grid patch extraction and weighted stitching of patch outputs
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from constants import BlendWindow
from utils.errors import CoverageError, ShapeError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PatchGrid:
    """Tiling geometry of one padded image"""

    patch_size: int
    stride: int
    origins: Tuple[Tuple[int, int], ...]
    padded_shape: Tuple[int, int]
    pad_amounts: Tuple[int, int] = (0, 0)

    @property
    def original_shape(self):
        return (
            self.padded_shape[0] - self.pad_amounts[0],
            self.padded_shape[1] - self.pad_amounts[1],
        )

    def __len__(self):
        return len(self.origins)


def pad_to_multiple(image, patch_size):
    """
    Reflect-pad bottom and right so both dimensions are multiples of patch_size

    Returns:
        (padded image, (bottom, right) pad amounts)
    """
    if patch_size < 1:
        raise ValidationError("patch_size must be >= 1")
    image = np.asarray(image)
    height, width = image.shape
    bottom = -height % patch_size
    right = -width % patch_size
    padded = image
    # Reflection needs at least two samples along an axis
    if bottom:
        mode = "reflect" if height > 1 else "edge"
        padded = np.pad(padded, ((0, bottom), (0, 0)), mode=mode)
    if right:
        mode = "reflect" if width > 1 else "edge"
        padded = np.pad(padded, ((0, 0), (0, right)), mode=mode)
    return padded, (bottom, right)


def _axis_origins(length, patch_size, stride):
    if length < patch_size:
        raise ValidationError(
            f"Image side {length} is smaller than patch size {patch_size}; pad first"
        )
    origins = list(range(0, length - patch_size + 1, stride))
    # A final anchor flush with the edge keeps the footprints covering the image
    if origins[-1] + patch_size < length:
        origins.append(length - patch_size)
    return origins


def build_grid(shape, patch_size, stride, pad_amounts=(0, 0)):
    """Row-major patch origins for an image of the given (padded) shape"""
    if patch_size < 1:
        raise ValidationError("patch_size must be >= 1")
    if stride < 1 or stride > patch_size:
        raise ValidationError(
            f"stride {stride} must lie in [1, patch_size={patch_size}]; "
            "a larger stride leaves gaps"
        )
    rows = _axis_origins(shape[0], patch_size, stride)
    cols = _axis_origins(shape[1], patch_size, stride)
    return PatchGrid(
        patch_size=patch_size,
        stride=stride,
        origins=tuple((row, col) for row in rows for col in cols),
        padded_shape=(int(shape[0]), int(shape[1])),
        pad_amounts=tuple(int(amount) for amount in pad_amounts),
    )


def extract_patches(image, patch_size, stride, pad_amounts=(0, 0)):
    """
    Cut an image into square patches on a regular grid

    Returns:
        (list of patches in row-major order, PatchGrid)
    """
    image = np.asarray(image)
    grid = build_grid(image.shape, patch_size, stride, pad_amounts)
    patches = [
        image[row : row + patch_size, col : col + patch_size].copy()
        for row, col in grid.origins
    ]
    return patches, grid


def tile_image(image, patch_size, stride):
    """Pad then extract, recording the pad amounts in the grid"""
    padded, pad_amounts = pad_to_multiple(image, patch_size)
    return extract_patches(padded, patch_size, stride, pad_amounts=pad_amounts)


def expected_patch_count(padded_shape, patch_size, stride):
    """Number of grid patches when stride divides (side - patch_size)"""
    rows = (padded_shape[0] - patch_size) // stride + 1
    cols = (padded_shape[1] - patch_size) // stride + 1
    return rows * cols


def normalize_patch(patch):
    """Scale 8-bit intensities to [0, 1]"""
    return np.asarray(patch, dtype=np.float32) / np.float32(255.0)


def normalize_mask(mask):
    """Any nonzero value is foreground"""
    return (np.asarray(mask) > 0).astype(np.uint8)


def foreground_fraction(mask):
    mask = np.asarray(mask)
    return float(np.count_nonzero(mask)) / mask.size


def select_patch_indices(mask_patches, min_foreground_fraction=0.01):
    """Indices of the mask patches that are neither (nearly) empty nor (nearly) full"""
    low, high = min_foreground_fraction, 1.0 - min_foreground_fraction
    return [
        index
        for index, mask in enumerate(mask_patches)
        if low <= foreground_fraction(mask) <= high
    ]


def select_training_patches(image_patches, mask_patches, min_foreground_fraction=0.01):
    """
    Keep the image/mask pairs whose foreground fraction lies in [f, 1 - f]

    Returns:
        List of (image patch, mask patch) pairs, input order preserved
    """
    if len(image_patches) != len(mask_patches):
        raise ValidationError(
            f"Got {len(image_patches)} image patches and {len(mask_patches)} masks"
        )
    keep = select_patch_indices(mask_patches, min_foreground_fraction)
    logger.debug(f"Selected {len(keep)} of {len(mask_patches)} patches")
    return [(image_patches[index], mask_patches[index]) for index in keep]


def blend_window(kind, patch_size):
    """
    Per-pixel blend weights of one patch

    hann_squared is the separable product of a Hann window sampled at pixel
    centres, sin^2(pi (i + 1/2) / N); it never reaches zero, and at half-patch
    stride the shifted copies sum to one along each axis.
    """
    if kind == BlendWindow.UNIT:
        return np.ones((patch_size, patch_size), dtype=np.float64)
    if kind == BlendWindow.HANN_SQUARED:
        centres = (np.arange(patch_size, dtype=np.float64) + 0.5) / patch_size
        profile = np.sin(np.pi * centres) ** 2
        return np.outer(profile, profile)
    raise ValidationError(f"Unknown window '{kind}', expected one of {BlendWindow.all()}")


def crop_to_shape(array, shape):
    """Remove bottom/right padding"""
    return np.asarray(array)[: shape[0], : shape[1]]


def stitch_patches(patch_maps, grid, window=BlendWindow.UNIT):
    """
    Weighted average of patch outputs placed back on the grid

    output = sum(window * patch) / sum(window) per pixel, cropped to the
    original (unpadded) shape. Patches are accumulated in grid order, so the
    result does not depend on the order in which they were computed.

    Raises:
        ValidationError: number of maps differs from the grid
        ShapeError: a map is not patch_size x patch_size
        CoverageError: some pixel received no weight
    """
    if len(patch_maps) != len(grid.origins):
        raise ValidationError(
            f"Got {len(patch_maps)} patch maps for a grid of {len(grid.origins)}"
        )
    size = grid.patch_size
    weights = blend_window(window, size)
    accumulated = np.zeros(grid.padded_shape, dtype=np.float64)
    total_weight = np.zeros(grid.padded_shape, dtype=np.float64)

    for (row, col), patch_map in zip(grid.origins, patch_maps):
        patch_map = np.asarray(patch_map, dtype=np.float64)
        if patch_map.shape != (size, size):
            raise ShapeError(f"Patch map has shape {patch_map.shape}, expected {size}²")
        accumulated[row : row + size, col : col + size] += weights * patch_map
        total_weight[row : row + size, col : col + size] += weights

    if np.any(total_weight <= 0):
        raise CoverageError(
            f"{int(np.sum(total_weight <= 0))} pixels received zero blend weight"
        )
    return crop_to_shape(accumulated / total_weight, grid.original_shape)
