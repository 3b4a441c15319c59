"""
Overlap and error scores between a predicted and a reference binary mask
"""

import numpy as np

from utils.errors import ValidationError


def _as_masks(prediction, truth):
    prediction = np.asarray(prediction)
    truth = np.asarray(truth)
    if prediction.shape != truth.shape:
        raise ValidationError(
            f"Prediction {prediction.shape} and truth {truth.shape} differ in shape"
        )
    if prediction.size == 0:
        raise ValidationError("Masks hold no pixels")
    return prediction.astype(bool), truth.astype(bool)


def overlap_counts(prediction, truth):
    """(intersection, union, |P|, |T|, differing pixels, pixel count)"""
    prediction, truth = _as_masks(prediction, truth)
    intersection = int(np.count_nonzero(prediction & truth))
    union = int(np.count_nonzero(prediction | truth))
    return (
        intersection,
        union,
        int(np.count_nonzero(prediction)),
        int(np.count_nonzero(truth)),
        int(np.count_nonzero(prediction ^ truth)),
        int(prediction.size),
    )


def iou_from_counts(intersection, union):
    # Two empty masks agree perfectly
    return 1.0 if union == 0 else intersection / union


def dice_from_counts(intersection, predicted, reference):
    total = predicted + reference
    return 1.0 if total == 0 else 2.0 * intersection / total


def iou(prediction, truth):
    """|P and T| / |P or T|; 1.0 when both masks are empty"""
    intersection, union, _, _, _, _ = overlap_counts(prediction, truth)
    return iou_from_counts(intersection, union)


def dice(prediction, truth):
    """2|P and T| / (|P| + |T|); 1.0 when both masks are empty"""
    intersection, _, predicted, reference, _, _ = overlap_counts(prediction, truth)
    return dice_from_counts(intersection, predicted, reference)


def mae(prediction, truth):
    """Mean absolute per-pixel difference"""
    _, _, _, _, differing, pixels = overlap_counts(prediction, truth)
    return differing / pixels
