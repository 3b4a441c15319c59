"""
IsoData (iterative intermeans) threshold selection on 8-bit images
"""

import logging
import math

import numpy as np
from skimage.filters import threshold_isodata

from constants import IsodataMode
from utils.errors import DegenerateHistogramError, ValidationError

logger = logging.getLogger(__name__)

LEVELS = 256
DEFAULT_TOLERANCE = 0.5
DEFAULT_MAX_ITERATIONS = 100


def intensity_histogram(image):
    """Pixel counts per 8-bit level"""
    pixels = np.asarray(image)
    if pixels.size == 0:
        raise ValidationError("Image is empty")
    if pixels.min() < 0 or pixels.max() > LEVELS - 1:
        raise ValidationError("Pixel values must lie in [0, 255]")
    if not np.issubdtype(pixels.dtype, np.integer):
        if not np.array_equal(pixels, np.rint(pixels)):
            raise ValidationError("Pixel values must be integral intensity levels")
    return np.bincount(pixels.astype(np.int64).ravel(), minlength=LEVELS)


def class_means(counts):
    """
    Means of the two classes split at every level t

    Returns:
        (below, above, valid): mean of pixels <= t, mean of pixels > t and a mask
        of the levels where both classes are non-empty
    """
    levels = np.arange(LEVELS, dtype=np.float64)
    counts = counts.astype(np.float64)
    n_below = np.cumsum(counts)
    s_below = np.cumsum(counts * levels)
    n_above = n_below[-1] - n_below
    s_above = s_below[-1] - s_below
    valid = (n_below > 0) & (n_above > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        below = np.where(n_below > 0, s_below / np.maximum(n_below, 1), np.nan)
        above = np.where(n_above > 0, s_above / np.maximum(n_above, 1), np.nan)
    return below, above, valid


def fixed_point_candidates(counts):
    """
    Levels t with mean(<= t) + mean(> t) in [2t, 2t + 2), from skimage

    Each such t is a fixed point of the integer IsoData iteration.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        candidates = threshold_isodata(
            hist=(np.asarray(counts), np.arange(LEVELS)), return_all=True
        )
    return np.asarray(candidates, dtype=np.int64)


def isodata_from_histogram(
    counts, tolerance=DEFAULT_TOLERANCE, max_iterations=DEFAULT_MAX_ITERATIONS
):
    """
    IsoData level of a 256-bin histogram

    The fixed points come from skimage; of those (and their upper neighbours)
    the levels within tolerance of their class midpoint are kept and the one
    nearest the iterated value is returned. When no integer level is within
    tolerance, as for a histogram holding only 0 and 255 (midpoint 127.5 at
    every level in between), the nearest skimage fixed point is returned:
    127 in that case.
    """
    occupied = np.flatnonzero(counts)
    if occupied.size < 2:
        raise DegenerateHistogramError(
            "IsoData needs at least two distinct intensity levels"
        )

    below, above, valid = class_means(counts)
    low, high = int(occupied[0]), int(occupied[-1]) - 1

    levels = np.arange(LEVELS, dtype=np.float64)
    t = float(np.sum(counts * levels) / np.sum(counts))
    for iteration in range(max_iterations):
        # Pixels <= t are exactly the levels <= floor(t)
        k = min(max(int(math.floor(t)), low), high)
        t_next = (below[k] + above[k]) / 2.0
        if abs(t_next - t) < tolerance:
            t = t_next
            break
        t = t_next
    else:
        logger.warning(f"IsoData did not converge in {max_iterations} iterations")

    candidates = fixed_point_candidates(counts)
    if candidates.size == 0:
        return int(min(max(round(t), low), high))

    # Snap to the integer level nearest to t that satisfies the fixed-point condition
    midpoints = (below + above) / 2.0
    nearby = np.unique(np.concatenate([candidates, candidates + 1]))
    nearby = nearby[nearby < LEVELS]
    fixed = nearby[valid[nearby] & (np.abs(nearby - midpoints[nearby]) < tolerance)]
    if fixed.size == 0:
        fixed = candidates
    return int(fixed[np.argmin(np.abs(fixed - t))])


def isodata_threshold(image, **kwargs):
    """
    IsoData threshold of a grayscale image

    Iterates t <- (mean(pixels <= t) + mean(pixels > t)) / 2 from the global mean
    until the update moves less than the tolerance, then rounds to an integer
    level. Pixels <= t are background, pixels > t foreground.

    Raises:
        DegenerateHistogramError: fewer than two distinct intensities
    """
    return isodata_from_histogram(intensity_histogram(image), **kwargs)


def binarize_threshold(image, level):
    """Foreground where intensity is strictly above level"""
    return (np.asarray(image) > level).astype(np.uint8)


def isodata_levels(images, mode=IsodataMode.PER_IMAGE, **kwargs):
    """
    IsoData levels for a set of images

    per-image returns one level per image; global pools the histograms and
    returns the same level for every image.
    """
    if mode not in IsodataMode.all():
        raise ValidationError(f"Unknown IsoData mode '{mode}'")
    histograms = [intensity_histogram(image) for image in images]
    if not histograms:
        raise ValidationError("No images given")
    if mode == IsodataMode.GLOBAL:
        level = isodata_from_histogram(np.sum(histograms, axis=0), **kwargs)
        return [level] * len(histograms)
    return [isodata_from_histogram(counts, **kwargs) for counts in histograms]
