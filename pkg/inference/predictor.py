"""
Patch-wise probability prediction and tiled full-image segmentation
"""

import logging

import numpy as np
import torch
from tqdm import tqdm

from config import TilingConfig
from core_imaging import normalize_patch, stitch_patches, tile_image
from prompts import full_patch_box
from segmodel import decode_mask, encode_image, encode_prompt
from utils.errors import ShapeError, ValidationError

logger = logging.getLogger(__name__)


def _device(model):
    return next(model.parameters()).device


def predict_patch(model, patch, box=None):
    """
    Probability map of one normalised patch

    Args:
        model: PromptableSegmenter
        patch: (P, P) float array in [0, 1]
        box: BoundingBox prompt; the full patch when None

    Returns:
        (P, P) float64 array, sigmoid of the decoder logits
    """
    size = model.config.patch_input_size
    box = box if box is not None else full_patch_box(size, size)
    model.eval()
    with torch.no_grad():
        logits = decode_mask(model, encode_image(model, patch), encode_prompt(model, box))
    return torch.sigmoid(logits.double()).cpu().numpy()


def predict_patches(model, patches, boxes=None, batch_size=8):
    """
    Batched predict_patch

    Returns:
        List of (P, P) float64 probability maps in input order
    """
    size = model.config.patch_input_size
    if boxes is None:
        boxes = [full_patch_box(size, size)] * len(patches)
    if len(boxes) != len(patches):
        raise ValidationError(f"Got {len(boxes)} boxes for {len(patches)} patches")
    for box in boxes:
        box.validate(size, size)

    device = _device(model)
    model.eval()
    maps = []
    starts = range(0, len(patches), batch_size)
    quiet = not logger.isEnabledFor(logging.INFO) or len(starts) < 2
    with torch.no_grad():
        for start in tqdm(starts, desc="patches", unit="batch", disable=quiet):
            chunk = np.stack(
                [np.asarray(patch, dtype=np.float32) for patch in patches[start : start + batch_size]]
            )
            if chunk.shape[1:] != (size, size):
                raise ShapeError(f"Patches have shape {chunk.shape[1:]}, expected ({size}, {size})")
            images = torch.from_numpy(chunk)[:, None].to(device)
            prompts = torch.tensor(
                [box.as_tuple() for box in boxes[start : start + batch_size]],
                dtype=torch.float32,
                device=device,
            )
            logits = model(images, prompts)[:, 0]
            maps.extend(torch.sigmoid(logits.double()).cpu().numpy())
    return maps


def binarize(probability, threshold=0.5):
    """1 where probability > threshold (ties go to background)"""
    if not 0.0 < threshold < 1.0:
        raise ValidationError("threshold must lie in (0, 1)")
    return (np.asarray(probability) > threshold).astype(np.uint8)


def segment_image(model, image, tiling=None):
    """
    pad -> tile -> predict with full-patch boxes -> blend -> crop -> binarize

    Returns:
        (BinaryMask, ProbabilityMap), both with the shape of image

    Raises:
        ValidationError: tiling patch size differs from the model input size
        CoverageError: some pixel received no blend weight
    """
    tiling = (tiling or TilingConfig()).validate()
    if tiling.patch_size != model.config.patch_input_size:
        raise ValidationError(
            f"Tiling patch size {tiling.patch_size} differs from model input "
            f"{model.config.patch_input_size}"
        )
    image = np.asarray(image)
    patches, grid = tile_image(image, tiling.patch_size, tiling.stride)
    normalized = [normalize_patch(patch) for patch in patches]
    logger.info(
        f"Segmenting {image.shape[0]}x{image.shape[1]} image with {len(grid)} patches "
        f"(stride {tiling.stride}, window {tiling.window})"
    )
    maps = predict_patches(model, normalized, batch_size=tiling.batch_size)
    probability = np.clip(stitch_patches(maps, grid, tiling.window), 0.0, 1.0)
    return binarize(probability, tiling.threshold), probability
