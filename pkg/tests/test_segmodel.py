"""
Unit Tests for the Promptable Segmentation Model (segmodel/)
"""

import os
from dataclasses import replace

import numpy as np
import pytest
import torch

from config import ModelConfig, WeightsConfig
from constants import Backbone, REFERENCE_TRAINABLE_PARAMETERS
from segmodel import (
    build_model,
    config_hash,
    count_trainable,
    decode_mask,
    encode_image,
    encode_prompt,
    freeze_encoders,
    load_pretrained,
    parameter_set,
    read_name_map,
    translate_state_dict,
)
from utils.errors import (
    IncompatibilityError,
    MissingWeightsError,
    ShapeError,
    ValidationError,
)


def published_layout(model, extra_rows=3):
    """
    Rename a model state dict to the published checkpoint layout

    Adds the tensors the name map drops so translation has to discard them.
    """
    generator = torch.Generator().manual_seed(0)
    published = {}
    for name, tensor in model.state_dict().items():
        if name.startswith("prompt_encoder.corner_embeddings."):
            index = int(name.split(".")[2])
            published[f"prompt_encoder.point_embeddings.{index + 2}.weight"] = tensor.clone()
        elif name == "mask_decoder.mask_token.weight":
            padding = torch.randn(extra_rows, tensor.shape[1], generator=generator)
            published["mask_decoder.mask_tokens.weight"] = torch.cat([tensor, padding])
        elif name.startswith("mask_decoder.output_hypernetwork."):
            suffix = name[len("mask_decoder.output_hypernetwork."):]
            published[f"mask_decoder.output_hypernetworks_mlps.0.{suffix}"] = tensor.clone()
        else:
            published[name] = tensor.clone()

    dim = model.config.decoder_dim
    for index in (0, 1):
        published[f"prompt_encoder.point_embeddings.{index}.weight"] = torch.zeros(1, dim)
    published["prompt_encoder.not_a_point_embed.weight"] = torch.zeros(1, dim)
    published["prompt_encoder.mask_downscaling.0.weight"] = torch.zeros(4, 1, 2, 2)
    published["mask_decoder.output_hypernetworks_mlps.1.layers.0.weight"] = torch.zeros(dim, dim)
    published["mask_decoder.iou_prediction_head.layers.0.weight"] = torch.zeros(dim, dim)
    return published


class TestBuildModel:
    """
    Test Suite for build_model
    """

    def test_same_seed_builds_identical_weights(self, toy_config):
        first = build_model(toy_config).state_dict()
        second = build_model(toy_config).state_dict()

        assert first.keys() == second.keys()
        assert all(torch.equal(first[name], second[name]) for name in first)

    def test_different_seed_changes_weights(self, toy_config):
        first = build_model(toy_config).state_dict()
        second = build_model(replace(toy_config, seed=1)).state_dict()

        assert any(not torch.equal(first[name], second[name]) for name in first)

    def test_build_does_not_consume_global_rng(self, toy_config):
        torch.manual_seed(123)
        expected = torch.rand(3)
        torch.manual_seed(123)
        build_model(toy_config)

        assert torch.equal(torch.rand(3), expected), "Global RNG stream was disturbed"

    def test_toy_model_is_desk_scale(self, toy_config):
        model = build_model(toy_config)

        assert sum(p.numel() for p in model.parameters()) < 500_000

    def test_missing_pretrained_weights(self, tmp_path):
        """The base backbone needs the published checkpoint on disk"""
        config = ModelConfig.from_preset(Backbone.PRETRAINED_BASE)

        with pytest.raises(MissingWeightsError):
            build_model(config, weights_path=str(tmp_path / "absent.pth"))


class TestFreezing:
    """Trainable flags after freeze_encoders"""

    def test_only_decoder_trainable(self, toy_config):
        model = freeze_encoders(build_model(toy_config))

        for name, _, trainable in parameter_set(model):
            assert trainable == name.startswith("mask_decoder."), f"Wrong flag on {name}"

    def test_freeze_is_idempotent(self, toy_config):
        once = parameter_set(freeze_encoders(build_model(toy_config)))
        twice = parameter_set(freeze_encoders(freeze_encoders(build_model(toy_config))))

        assert once == twice

    def test_trainable_count_matches_decoder_tensor_sizes(self, toy_model):
        expected = sum(
            int(np.prod(shape))
            for name, shape, _ in parameter_set(toy_model)
            if name.startswith("mask_decoder.")
        )

        assert count_trainable(toy_model) == expected
        assert count_trainable(toy_model) == sum(
            p.numel() for p in toy_model.mask_decoder.parameters()
        )

    @pytest.mark.skipif(
        not os.path.isfile(WeightsConfig.base_path()),
        reason="pretrained base weights are not installed (run `python main.py fetch-weights`)",
    )
    @pytest.mark.xfail(
        strict=False,
        reason="single-mask decoder is smaller than the reported multi-output head",
    )
    def test_pretrained_trainable_count_near_reference(self):
        model = freeze_encoders(build_model(ModelConfig.from_preset(Backbone.PRETRAINED_BASE)))

        count = count_trainable(model)

        assert abs(count - REFERENCE_TRAINABLE_PARAMETERS) <= 0.05 * REFERENCE_TRAINABLE_PARAMETERS


class TestEncodeImage:
    """
    Test Suite for encode_image
    """

    def test_embedding_shape(self, toy_model):
        embedding = encode_image(toy_model, np.full((256, 256), 0.5, dtype=np.float32))

        assert tuple(embedding.shape) == (32, 16, 16)

    def test_deterministic(self, toy_model):
        patch = np.random.default_rng(0).random((256, 256)).astype(np.float32)

        assert torch.equal(encode_image(toy_model, patch), encode_image(toy_model, patch))

    def test_content_changes_embedding(self, toy_model):
        zeros = encode_image(toy_model, np.zeros((256, 256), dtype=np.float32))
        ones = encode_image(toy_model, np.ones((256, 256), dtype=np.float32))

        assert not torch.allclose(zeros, ones)

    def test_wrong_patch_size(self, toy_model):
        with pytest.raises(ShapeError):
            encode_image(toy_model, np.zeros((128, 128), dtype=np.float32))


class TestEncodePrompt:
    """
    Test Suite for encode_prompt
    """

    def test_prompt_shape(self, toy_model):
        assert tuple(encode_prompt(toy_model, (0, 0, 255, 255)).shape) == (2, 32)

    def test_distinct_boxes_give_distinct_embeddings(self, toy_model):
        full = encode_prompt(toy_model, (0, 0, 255, 255))
        pixel = encode_prompt(toy_model, (10, 10, 10, 10))

        assert not torch.allclose(full, pixel)

    def test_box_outside_patch(self, toy_model):
        with pytest.raises(ValidationError):
            encode_prompt(toy_model, (0, 0, 256, 255))


class TestDecodeMask:
    """
    Test Suite for decode_mask
    """

    def test_logits_shape(self, toy_model):
        embedding = encode_image(toy_model, np.zeros((256, 256), dtype=np.float32))
        prompt = encode_prompt(toy_model, (0, 0, 255, 255))

        assert tuple(decode_mask(toy_model, embedding, prompt).shape) == (256, 256)

    def test_logits_finite_over_random_inputs(self, toy_model):
        """20 seeded patches x 5 seeded boxes"""
        rng = np.random.default_rng(7)
        for _ in range(20):
            embedding = encode_image(toy_model, rng.random((256, 256)).astype(np.float32))
            for _ in range(5):
                x0, y0 = (int(v) for v in rng.integers(0, 200, 2))
                x1, y1 = (int(v) for v in rng.integers(200, 256, 2))
                prompt = encode_prompt(toy_model, (x0, y0, x1, y1))

                logits = decode_mask(toy_model, embedding, prompt)

                assert torch.isfinite(logits).all()

    def test_prompt_changes_logits(self, toy_model):
        embedding = encode_image(toy_model, np.random.default_rng(1).random((256, 256)).astype(np.float32))

        with torch.no_grad():
            full = decode_mask(toy_model, embedding, encode_prompt(toy_model, (0, 0, 255, 255)))
            corner = decode_mask(toy_model, embedding, encode_prompt(toy_model, (0, 0, 31, 31)))

        assert not torch.allclose(full, corner)

    def test_wrong_embedding_shape(self, toy_model):
        prompt = encode_prompt(toy_model, (0, 0, 255, 255))

        with pytest.raises(ShapeError):
            decode_mask(toy_model, torch.zeros(32, 8, 8), prompt)

    def test_wrong_prompt_shape(self, toy_model):
        embedding = torch.zeros(32, 16, 16)

        with pytest.raises(ShapeError):
            decode_mask(toy_model, embedding, torch.zeros(3, 32))


class TestGradientIsolation:
    """Encoders never receive gradients or updates"""

    def test_gradients_reach_decoder_only(self, toy_model):
        embedding = encode_image(toy_model, np.full((256, 256), 0.3, dtype=np.float32))
        prompt = encode_prompt(toy_model, (20, 20, 200, 200))

        decode_mask(toy_model, embedding, prompt).sum().backward()

        for name, parameter in toy_model.named_parameters():
            if name.startswith("mask_decoder."):
                continue
            assert parameter.grad is None or not parameter.grad.any(), f"{name} got a gradient"
        assert any(p.grad is not None and p.grad.any() for p in toy_model.mask_decoder.parameters())

    def test_optimizer_steps_leave_encoders_untouched(self, toy_model):
        encoders_before = {
            name: tensor.clone()
            for name, tensor in toy_model.state_dict().items()
            if not name.startswith("mask_decoder.")
        }
        decoder_before = [p.detach().clone() for p in toy_model.mask_decoder.parameters()]
        optimizer = torch.optim.Adam(
            [p for p in toy_model.parameters() if p.requires_grad], lr=1e-3
        )
        images = torch.rand(2, 1, 256, 256, generator=torch.Generator().manual_seed(0))
        boxes = torch.tensor([[0.0, 0.0, 255.0, 255.0], [16.0, 16.0, 128.0, 128.0]])

        for _ in range(5):
            optimizer.zero_grad()
            toy_model(images, boxes).mean().backward()
            optimizer.step()

        state = toy_model.state_dict()
        for name, tensor in encoders_before.items():
            assert torch.equal(state[name], tensor), f"{name} changed"
        assert any(
            not torch.equal(before, after)
            for before, after in zip(decoder_before, toy_model.mask_decoder.parameters())
        )


class TestConfigHash:
    """config_hash covers architecture fields only"""

    def test_seed_excluded(self, toy_config):
        assert config_hash(toy_config) == config_hash(replace(toy_config, seed=99))

    def test_architecture_change(self, toy_config):
        assert config_hash(toy_config) != config_hash(replace(toy_config, decoder_depth=1))


class TestPretrainedAdapter:
    """
    Test Suite for the name-translation manifest and load_pretrained
    """

    def test_name_map_parses(self):
        rules = read_name_map()

        dropped = [rule for rule in rules if rule.target is None]
        sliced = [rule for rule in rules if rule.rows is not None]
        assert dropped, "Expected drop rules"
        assert [rule.rows for rule in sliced] == [(0, 1)]

    def test_translation_keeps_first_mask_token(self, toy_config):
        model = build_model(toy_config)
        published = published_layout(model)

        translated = translate_state_dict(published, read_name_map())

        assert torch.equal(
            translated["mask_decoder.mask_token.weight"],
            model.state_dict()["mask_decoder.mask_token.weight"],
        )
        assert "mask_decoder.iou_prediction_head.layers.0.weight" not in translated

    def test_load_round_trip(self, toy_config, tmp_path):
        source = build_model(toy_config)
        path = str(tmp_path / "published.pth")
        torch.save(published_layout(source), path)
        target = build_model(replace(toy_config, seed=5))

        load_pretrained(target, path)

        expected = source.state_dict()
        loaded = target.state_dict()
        assert all(torch.equal(loaded[name], expected[name]) for name in expected)

    def test_unmapped_tensor(self, toy_config):
        published = published_layout(build_model(toy_config))
        published["unknown_head.weight"] = torch.zeros(1)

        with pytest.raises(IncompatibilityError):
            translate_state_dict(published, read_name_map())

    def test_missing_tensor(self, toy_config, tmp_path):
        published = published_layout(build_model(toy_config))
        del published["mask_decoder.iou_token.weight"]
        path = str(tmp_path / "published.pth")
        torch.save(published, path)

        with pytest.raises(IncompatibilityError):
            load_pretrained(build_model(toy_config), path)

    def test_mismatched_shape(self, toy_config, tmp_path):
        published = published_layout(build_model(toy_config))
        published["mask_decoder.iou_token.weight"] = torch.zeros(1, 7)
        path = str(tmp_path / "published.pth")
        torch.save(published, path)

        with pytest.raises(IncompatibilityError):
            load_pretrained(build_model(toy_config), path)
