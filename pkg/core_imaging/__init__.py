"""Image ingestion, thresholding and tiling"""

from .io import (
    ImagePair,
    load_grayscale,
    load_mask,
    save_grayscale,
    save_mask,
    save_probability_png,
    load_probability_png,
    list_images,
    discover_pairs,
)
from .isodata import (
    isodata_threshold,
    isodata_levels,
    binarize_threshold,
    intensity_histogram,
)
from .tiling import (
    PatchGrid,
    pad_to_multiple,
    build_grid,
    extract_patches,
    tile_image,
    expected_patch_count,
    normalize_patch,
    normalize_mask,
    foreground_fraction,
    select_patch_indices,
    select_training_patches,
    blend_window,
    crop_to_shape,
    stitch_patches,
)

__all__ = [
    "ImagePair",
    "load_grayscale",
    "load_mask",
    "save_grayscale",
    "save_mask",
    "save_probability_png",
    "load_probability_png",
    "list_images",
    "discover_pairs",
    "isodata_threshold",
    "isodata_levels",
    "binarize_threshold",
    "intensity_histogram",
    "PatchGrid",
    "pad_to_multiple",
    "build_grid",
    "extract_patches",
    "tile_image",
    "expected_patch_count",
    "normalize_patch",
    "normalize_mask",
    "foreground_fraction",
    "select_patch_indices",
    "select_training_patches",
    "blend_window",
    "crop_to_shape",
    "stitch_patches",
]
