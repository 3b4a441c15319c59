"""
Checkpoint directories: weights.pt, state.json and a plain-text manifest.txt
"""

import json
import logging
import os

import torch

from segmodel import config_hash, count_trainable
from utils.errors import ChecksumError, IncompatibilityError, LayoutError
from utils.manifest import sha256_file

from .schedule import TrainingState

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT_VERSION = 1
WEIGHTS_FILENAME = "weights.pt"
STATE_FILENAME = "state.json"
MANIFEST_FILENAME = "manifest.txt"


def _write_text_manifest(path, entries):
    with open(path, "w", encoding="utf-8") as handle:
        for key, value in entries.items():
            handle.write(f"{key}: {value}\n")


def read_checkpoint_manifest(path):
    """Parse manifest.txt of a checkpoint directory into a dict of strings"""
    manifest_path = os.path.join(path, MANIFEST_FILENAME)
    if not os.path.isfile(manifest_path):
        raise LayoutError(f"{path} is not a checkpoint directory (no {MANIFEST_FILENAME})")
    entries = {}
    with open(manifest_path, "r", encoding="utf-8") as handle:
        for line in handle:
            key, separator, value = line.partition(":")
            if separator:
                entries[key.strip()] = value.strip()
    return entries


def save_checkpoint(model, state, path, epoch, val_loss):
    """
    Write model weights, training state and manifest into directory path

    Returns:
        The manifest entries
    """
    os.makedirs(path, exist_ok=True)
    weights_path = os.path.join(path, WEIGHTS_FILENAME)
    tensors = {name: tensor.detach().cpu().clone() for name, tensor in model.state_dict().items()}
    torch.save(tensors, weights_path)

    with open(os.path.join(path, STATE_FILENAME), "w", encoding="utf-8") as handle:
        json.dump(state.to_dict(), handle, indent=2, sort_keys=True)

    entries = {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "backbone": model.config.backbone,
        "config_hash": config_hash(model.config),
        "epoch": epoch,
        "val_loss": repr(float(val_loss)),
        "trainable_parameters": count_trainable(model),
        "weights_sha256": sha256_file(weights_path),
    }
    _write_text_manifest(os.path.join(path, MANIFEST_FILENAME), entries)
    logger.info(f"Saved checkpoint for epoch {epoch} (val_loss {val_loss:.6f}) to {path}")
    return entries


def load_checkpoint(path, config=None):
    """
    Read a checkpoint directory

    Args:
        path: Checkpoint directory
        config: ModelConfig the weights must belong to; skipped when None

    Returns:
        (state_dict, TrainingState, manifest entries)

    Raises:
        ChecksumError: weights file missing, altered or unreadable
        IncompatibilityError: checkpoint built for a different ModelConfig
    """
    manifest = read_checkpoint_manifest(path)
    if int(manifest.get("format_version", -1)) != CHECKPOINT_FORMAT_VERSION:
        raise IncompatibilityError(
            f"Unsupported checkpoint format version {manifest.get('format_version')}"
        )
    if config is not None and manifest.get("config_hash") != config_hash(config):
        raise IncompatibilityError(
            "Checkpoint was written for a different model configuration",
            details={"expected": config_hash(config), "found": manifest.get("config_hash")},
        )

    weights_path = os.path.join(path, WEIGHTS_FILENAME)
    if not os.path.isfile(weights_path):
        raise ChecksumError(f"Checkpoint weights missing: {weights_path}")
    if sha256_file(weights_path) != manifest.get("weights_sha256"):
        raise ChecksumError(f"Checkpoint weights {weights_path} fail the checksum")
    try:
        state_dict = torch.load(weights_path, map_location="cpu", weights_only=True)
        with open(os.path.join(path, STATE_FILENAME), "r", encoding="utf-8") as handle:
            state = TrainingState.from_dict(json.load(handle))
    except (OSError, ValueError, RuntimeError, TypeError) as e:
        raise ChecksumError(f"Checkpoint {path} is corrupt: {str(e)}")
    return state_dict, state, manifest


def restore_model(model, path):
    """Load checkpoint weights into a model built from the same config"""
    state_dict, state, manifest = load_checkpoint(path, model.config)
    model.load_state_dict(state_dict, strict=True)
    logger.info(f"Restored weights of epoch {manifest.get('epoch')} from {path}")
    return model, state
