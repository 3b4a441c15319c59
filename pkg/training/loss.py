"""
Dice + binary cross-entropy loss on decoder logits
"""

import torch
from torch.nn import functional as F

from utils.errors import ValidationError

DICE_EPSILON = 1e-5


def dice_ce_loss(logits, target, epsilon=DICE_EPSILON):
    """
    Soft Dice term plus mean binary cross-entropy, both on p = sigmoid(logits)

    A (H, W) map is scored as a single sample; for (B, ..., H, W) batches the
    Dice term is computed per sample and averaged, the cross-entropy is the
    mean over every pixel. Works in the dtype of the logits.

    Raises:
        ValidationError: logits and target shapes differ
    """
    if tuple(logits.shape) != tuple(target.shape):
        raise ValidationError(
            f"Logits {tuple(logits.shape)} and target {tuple(target.shape)} differ in shape"
        )
    target = target.to(logits.dtype)
    if logits.dim() <= 2:
        logits, target = logits.reshape(1, -1), target.reshape(1, -1)
    else:
        logits, target = logits.flatten(1), target.flatten(1)

    probability = torch.sigmoid(logits)
    intersection = (probability * target).sum(dim=1)
    denominator = probability.sum(dim=1) + target.sum(dim=1)
    dice_term = 1.0 - (2.0 * intersection + epsilon) / (denominator + epsilon)

    # Computed from the logits for stability at saturation
    ce_term = F.binary_cross_entropy_with_logits(logits, target, reduction="mean")
    return dice_term.mean() + ce_term
