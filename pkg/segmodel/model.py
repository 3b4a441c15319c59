"""
Promptable segmentation model: image encoder -> (image, prompt embeddings) -> mask decoder
"""

import hashlib
import json
import logging
import os
from dataclasses import asdict

import numpy as np
import torch
from torch import nn
from torch.nn import functional as F

from config import WeightsConfig
from constants import Backbone
from prompts import BoundingBox
from utils.errors import MissingWeightsError, ShapeError, ValidationError

from .image_encoder import ImageEncoder
from .mask_decoder import MaskDecoder
from .prompt_encoder import BoxPromptEncoder

logger = logging.getLogger(__name__)

# Desk-scale bound for the toy backbone
TOY_PARAMETER_LIMIT = 500_000


class PromptableSegmenter(nn.Module):
    def __init__(self, config):
        super().__init__()
        self.config = config
        self.image_encoder = ImageEncoder(
            image_size=config.encoder_image_size,
            token_size=config.token_size,
            in_chans=config.in_chans,
            embed_dim=config.encoder_embed_dim,
            depth=config.encoder_depth,
            num_heads=config.encoder_heads,
            out_chans=config.decoder_dim,
            window_size=config.window_size,
            global_attn_indexes=tuple(config.global_attn_indexes),
        )
        self.prompt_encoder = BoxPromptEncoder(config.decoder_dim, config.embedding_grid)
        self.mask_decoder = MaskDecoder(
            config.decoder_dim,
            config.decoder_depth,
            config.decoder_heads,
            config.decoder_mlp_dim,
        )
        self.register_buffer(
            "pixel_mean", torch.tensor(config.pixel_mean).view(-1, 1, 1), persistent=False
        )
        self.register_buffer(
            "pixel_std", torch.tensor(config.pixel_std).view(-1, 1, 1), persistent=False
        )

    @property
    def encoders_frozen(self):
        return not any(
            parameter.requires_grad
            for module in (self.image_encoder, self.prompt_encoder)
            for parameter in module.parameters()
        )

    def preprocess(self, images):
        """(B, 1, P, P) in [0, 1] -> encoder input (B, in_chans, S, S)"""
        size = self.config.patch_input_size
        if images.dim() != 4 or images.shape[1] != 1 or images.shape[-2:] != (size, size):
            raise ShapeError(
                f"Expected patches of shape (B, 1, {size}, {size}), got {tuple(images.shape)}"
            )
        x = images.to(self.pixel_mean.dtype)
        if self.config.in_chans > 1:
            # Grayscale replicated to the channel count the encoder expects
            x = x.expand(-1, self.config.in_chans, -1, -1)
        if self.config.encoder_image_size != size:
            target = (self.config.encoder_image_size,) * 2
            x = F.interpolate(x, size=target, mode="bilinear", align_corners=False)
        return (x - self.pixel_mean) / self.pixel_std

    def embed_images(self, images):
        x = self.preprocess(images)
        if self.encoders_frozen:
            with torch.no_grad():
                return self.image_encoder(x)
        return self.image_encoder(x)

    def embed_boxes(self, boxes):
        """(B, 4) pixel boxes -> sparse (B, 2, C) embeddings"""
        scale = float(max(self.config.patch_input_size - 1, 1))
        corners = boxes.to(torch.float32).view(-1, 2, 2) / scale
        if self.encoders_frozen:
            with torch.no_grad():
                return self.prompt_encoder(corners)
        return self.prompt_encoder(corners)

    def predict_logits(self, image_embeddings, sparse_embeddings):
        """Decoder logits upsampled to (B, 1, P, P)"""
        batch = image_embeddings.shape[0]
        low_res = self.mask_decoder(
            image_embeddings=image_embeddings,
            image_pe=self.prompt_encoder.get_dense_pe(),
            sparse_prompt_embeddings=sparse_embeddings,
            dense_prompt_embeddings=self.prompt_encoder.dense_embeddings(batch),
        )
        size = (self.config.patch_input_size,) * 2
        return F.interpolate(low_res, size=size, mode="bilinear", align_corners=False)

    def forward(self, images, boxes):
        return self.predict_logits(self.embed_images(images), self.embed_boxes(boxes))


def config_hash(config):
    """sha256 of the architecture fields of a ModelConfig (the seed is excluded)"""
    fields = asdict(config)
    fields.pop("seed", None)
    canonical = json.dumps(fields, sort_keys=True, default=list)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def build_model(config, weights_path=None, pretrained=True):
    """
    Build the model for a config

    The toy backbone is initialised deterministically from config.seed. The
    pretrained base backbone loads the published checkpoint through the
    name-translation manifest, unless pretrained is False (the weights then
    come from a fine-tuned checkpoint).

    Raises:
        MissingWeightsError: pretrained weights requested but not found
    """
    config.validate()
    load_published = config.backbone == Backbone.PRETRAINED_BASE and pretrained
    path = weights_path or WeightsConfig.base_path()
    if load_published and not os.path.isfile(path):
        raise MissingWeightsError(
            f"Pretrained weights not found at {path}; "
            "download them with `python main.py fetch-weights`"
        )

    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(config.seed)
        model = PromptableSegmenter(config)
        if config.backbone == Backbone.TOY:
            nn.init.trunc_normal_(model.image_encoder.pos_embed, std=0.02)

    if config.backbone == Backbone.TOY:
        total = sum(parameter.numel() for parameter in model.parameters())
        if total >= TOY_PARAMETER_LIMIT:
            raise ValidationError(
                f"Toy config has {total} parameters, limit is {TOY_PARAMETER_LIMIT}"
            )
    elif load_published:
        from .weights import load_pretrained

        load_pretrained(model, path)

    model.eval()
    logger.info(
        f"Built {config.backbone} model: "
        f"{sum(p.numel() for p in model.parameters())} parameters"
    )
    return model


def freeze_encoders(model):
    """Only the mask decoder stays trainable; idempotent"""
    for module in (model.image_encoder, model.prompt_encoder):
        module.requires_grad_(False)
        module.eval()
    model.mask_decoder.requires_grad_(True)
    return model


def count_trainable(model):
    return sum(p.numel() for p in model.parameters() if p.requires_grad)


def parameter_set(model):
    """(name, shape, trainable) for every parameter tensor"""
    return [
        (name, tuple(parameter.shape), parameter.requires_grad)
        for name, parameter in model.named_parameters()
    ]


def _device(model):
    return next(model.parameters()).device


def encode_image(model, patch):
    """
    Image embedding (C, h, w) of one normalised patch

    Raises:
        ShapeError: patch is not patch_input_size x patch_input_size
    """
    size = model.config.patch_input_size
    patch = np.asarray(patch, dtype=np.float32)
    if patch.shape != (size, size):
        raise ShapeError(f"Patch has shape {patch.shape}, expected ({size}, {size})")
    images = torch.from_numpy(patch).to(_device(model))[None, None]
    with torch.no_grad():
        return model.embed_images(images)[0]


def encode_prompt(model, box):
    """
    Sparse prompt embedding (2, C) of one box

    Raises:
        ValidationError: box outside the patch
    """
    size = model.config.patch_input_size
    box = BoundingBox.from_sequence(
        box.as_tuple() if isinstance(box, BoundingBox) else box
    ).validate(size, size)
    boxes = torch.tensor([box.as_tuple()], dtype=torch.float32, device=_device(model))
    with torch.no_grad():
        return model.embed_boxes(boxes)[0]


def decode_mask(model, image_embedding, prompt_embedding):
    """
    Logits (P, P) for one image embedding and one prompt embedding

    Gradients flow into the decoder parameters.

    Raises:
        ShapeError: embeddings do not match the model config
    """
    config = model.config
    expected_image = (config.decoder_dim, *config.embedding_grid)
    if tuple(image_embedding.shape) != expected_image:
        raise ShapeError(
            f"Image embedding has shape {tuple(image_embedding.shape)}, "
            f"expected {expected_image}"
        )
    if tuple(prompt_embedding.shape) != (2, config.decoder_dim):
        raise ShapeError(
            f"Prompt embedding has shape {tuple(prompt_embedding.shape)}, "
            f"expected (2, {config.decoder_dim})"
        )
    logits = model.predict_logits(image_embedding[None], prompt_embedding[None])
    return logits[0, 0]
