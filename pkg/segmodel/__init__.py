"""Promptable segmentation model"""

from .model import (
    PromptableSegmenter,
    build_model,
    freeze_encoders,
    count_trainable,
    parameter_set,
    config_hash,
    encode_image,
    encode_prompt,
    decode_mask,
)
from .weights import read_name_map, translate_state_dict, load_pretrained

__all__ = [
    "PromptableSegmenter",
    "build_model",
    "freeze_encoders",
    "count_trainable",
    "parameter_set",
    "config_hash",
    "encode_image",
    "encode_prompt",
    "decode_mask",
    "read_name_map",
    "translate_state_dict",
    "load_pretrained",
]
