"""
Image ingestion and output

Images are handled as 2-D numpy arrays: grayscale images as uint8 in [0, 255],
binary masks as uint8 in {0, 1}, probability maps as float64 in [0, 1].
"""

import logging
import os
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from constants import IMAGE_SUFFIXES, SourceTag
from utils.errors import ImageFormatError, LayoutError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ImagePair:
    """Filename-matched image/mask pair of a dataset"""

    name: str
    image_path: str
    mask_path: str
    source: str


def load_grayscale(path):
    """
    Read a PNG or TIFF as an 8-bit grayscale array

    RGB(A) and palette images are reduced to the average of their colour
    channels; 16-bit and float images are rescaled to [0, 255].

    Raises:
        FileNotFoundError: path does not exist
        ImageFormatError: the bytes do not decode as an image
        ValidationError: the image has a zero dimension
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f"Image not found: {path}")

    try:
        with Image.open(path) as handle:
            handle.load()
            pixels = _to_gray_array(handle)
    except (UnidentifiedImageError, OSError, SyntaxError) as e:
        raise ImageFormatError(f"Cannot decode image {path}: {str(e)}")

    if pixels.ndim != 2 or pixels.shape[0] < 1 or pixels.shape[1] < 1:
        raise ValidationError(f"Image {path} has zero size: {pixels.shape}")
    return pixels


def _to_gray_array(handle):
    mode = handle.mode
    if mode == "L":
        return np.asarray(handle, dtype=np.uint8).copy()
    if mode == "1":
        return np.asarray(handle, dtype=np.uint8) * 255
    if mode in ("LA",):
        return np.asarray(handle.getchannel("L"), dtype=np.uint8).copy()
    if mode in ("I;16", "I;16B", "I;16L", "I"):
        raw = np.asarray(handle).astype(np.float64)
        scale = 65535.0 if raw.max(initial=0) > 255 or mode.startswith("I;16") else 255.0
        return np.clip(np.rint(raw / scale * 255.0), 0, 255).astype(np.uint8)
    if mode == "F":
        raw = np.asarray(handle, dtype=np.float64)
        low, high = raw.min(initial=0.0), raw.max(initial=0.0)
        if high <= 1.0 and low >= 0.0:
            raw = raw * 255.0
        return np.clip(np.rint(raw), 0, 255).astype(np.uint8)

    # RGB, RGBA, P, CMYK and the rest: average the colour channels
    rgb = np.asarray(handle.convert("RGB"), dtype=np.float64)
    return np.rint(rgb.mean(axis=2)).astype(np.uint8)


def load_mask(path):
    """Read a mask file; any nonzero pixel is foreground"""
    return (load_grayscale(path) > 0).astype(np.uint8)


def save_grayscale(path, image):
    """Write an 8-bit grayscale PNG"""
    _check_png(path)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    Image.fromarray(np.asarray(image, dtype=np.uint8)).save(path)
    return path


def save_mask(path, mask):
    """Write a binary mask as 0/255 PNG"""
    _check_png(path)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    pixels = (np.asarray(mask) > 0).astype(np.uint8) * 255
    Image.fromarray(pixels).save(path)
    return path


def save_probability_png(path, probability):
    """Write a probability map as a 16-bit PNG, value round(p * 65535)"""
    _check_png(path)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    scaled = np.rint(np.clip(probability, 0.0, 1.0) * 65535.0).astype(np.uint16)
    Image.fromarray(scaled).save(path)
    return path


def load_probability_png(path):
    """Inverse of save_probability_png"""
    with Image.open(path) as handle:
        return np.asarray(handle, dtype=np.float64) / 65535.0


def _check_png(path):
    if not path.lower().endswith(".png"):
        raise ImageFormatError(f"Only PNG output is supported, got {path}")


def list_images(directory):
    """Image files of a directory, sorted by name"""
    if not os.path.isdir(directory):
        raise LayoutError(f"Directory not found: {directory}")
    return sorted(
        os.path.join(directory, entry)
        for entry in os.listdir(directory)
        if entry.lower().endswith(IMAGE_SUFFIXES)
    )


def _by_stem(paths):
    return {os.path.splitext(os.path.basename(path))[0]: path for path in paths}


def discover_pairs(root, default_source=SourceTag.CT, require_masks=True):
    """
    Pair images/ and masks/ files by filename stem

    The root is either a single dataset (root/images, root/masks) tagged with
    default_source, or holds one such dataset per source tag
    (root/CT/..., root/SEM/...).

    Returns:
        Sorted list of ImagePair; mask_path is None for unmatched images when
        require_masks is False
    """
    if not os.path.isdir(root):
        raise LayoutError(f"Dataset root not found: {root}")

    if os.path.isdir(os.path.join(root, "images")):
        layouts = [(root, SourceTag.parse(default_source) or SourceTag.CT)]
    else:
        layouts = [
            (os.path.join(root, entry), SourceTag.parse(entry))
            for entry in sorted(os.listdir(root))
            if SourceTag.parse(entry) and os.path.isdir(os.path.join(root, entry))
        ]
    if not layouts:
        raise LayoutError(
            f"No images/ directory or per-source ({'/'.join(SourceTag.all())}) "
            f"directories under {root}"
        )

    pairs = []
    for directory, source in layouts:
        images = _by_stem(list_images(os.path.join(directory, "images")))
        masks_dir = os.path.join(directory, "masks")
        masks = _by_stem(list_images(masks_dir)) if os.path.isdir(masks_dir) else {}
        for stem in sorted(images):
            if stem in masks or not require_masks:
                pairs.append(ImagePair(stem, images[stem], masks.get(stem), source))
        unmatched = sorted(set(images) - set(masks))
        if unmatched and require_masks:
            logger.warning(f"{len(unmatched)} images in {directory} have no mask")

    if not pairs:
        raise LayoutError(f"No filename-matched image/mask pairs under {root}")
    logger.info(f"Found {len(pairs)} image pairs under {root}")
    return pairs
