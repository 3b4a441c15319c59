"""
Unit Tests for Tiled Inference (inference/)
"""

import os

import numpy as np
import pandas as pd
import pytest
import torch

from config import ModelConfig, TilingConfig, TrainConfig
from constants import Backbone, BlendWindow, OutputFormat
from core_imaging import build_grid, load_probability_png, normalize_patch, tile_image
from inference import binarize, predict_patch, predict_patches, segment_image, write_outputs
from metrics import dice
from prompts import full_patch_box
from segmodel import build_model, decode_mask, encode_image, encode_prompt
from training import fine_tune, restore_model
from utils.errors import ValidationError

from tests.conftest import disk_pair, write_disks_dataset


class TestPredictPatch:
    """
    Test Suite for predict_patch and predict_patches
    """

    def test_range_and_shape(self, toy_model):
        patch = np.random.default_rng(0).random((256, 256)).astype(np.float32)

        probability = predict_patch(toy_model, patch)

        assert probability.shape == (256, 256)
        assert probability.min() >= 0.0 and probability.max() <= 1.0

    def test_sigmoid_of_decoder_logits(self, toy_model):
        patch = np.random.default_rng(1).random((256, 256)).astype(np.float32)
        box = full_patch_box(256, 256)
        with torch.no_grad():
            logits = decode_mask(toy_model, encode_image(toy_model, patch), encode_prompt(toy_model, box))
        expected = 1.0 / (1.0 + np.exp(-logits.double().numpy()))

        probability = predict_patch(toy_model, patch, box)

        assert np.max(np.abs(probability - expected)) <= 1e-12

    def test_batched_matches_single(self, toy_model):
        rng = np.random.default_rng(2)
        patches = [rng.random((256, 256)).astype(np.float32) for _ in range(3)]

        batched = predict_patches(toy_model, patches, batch_size=2)

        for patch, probability in zip(patches, batched):
            assert np.allclose(probability, predict_patch(toy_model, patch), atol=1e-5)

    def test_box_count_mismatch(self, toy_model):
        with pytest.raises(ValidationError):
            predict_patches(
                toy_model, [np.zeros((256, 256), np.float32)], boxes=[], batch_size=1
            )


class TestBinarize:
    """
    Test Suite for binarize
    """

    def test_above_threshold(self):
        assert binarize(np.full((4, 4), 0.7), 0.5).all()

    def test_tie_goes_to_background(self):
        assert not binarize(np.full((4, 4), 0.5), 0.5).any()

    def test_matches_pixel_comparison(self):
        probability = np.random.default_rng(5).random((32, 32))

        mask = binarize(probability, 0.5)

        for r in range(32):
            for c in range(32):
                assert mask[r, c] == (1 if probability[r, c] > 0.5 else 0)

    @pytest.mark.parametrize("threshold", [0.0, 1.0, -0.2])
    def test_threshold_outside_open_interval(self, threshold):
        with pytest.raises(ValidationError):
            binarize(np.zeros((2, 2)), threshold)


class TestSegmentImage:
    """
    Test Suite for segment_image
    """

    def test_output_shape_for_non_multiple_size(self, toy_model):
        image = np.random.default_rng(3).integers(0, 256, (300, 200)).astype(np.uint8)

        mask, probability = segment_image(toy_model, image, TilingConfig(stride=128))

        assert mask.shape == (300, 200) and probability.shape == (300, 200)
        assert set(np.unique(mask)) <= {0, 1}
        assert probability.min() >= 0.0 and probability.max() <= 1.0

    def test_partition_equals_per_patch_binarization(self, toy_model):
        """stride == patch and unit window place each patch result as-is"""
        image = np.random.default_rng(4).integers(0, 256, (512, 512)).astype(np.uint8)
        tiling = TilingConfig(stride=256, window=BlendWindow.UNIT)

        mask, _ = segment_image(toy_model, image, tiling)

        patches, grid = tile_image(image, 256, 256)
        expected = np.zeros((512, 512), dtype=np.uint8)
        for (row, col), patch in zip(grid.origins, patches):
            probability = predict_patch(toy_model, normalize_patch(patch))
            expected[row : row + 256, col : col + 256] = binarize(probability, 0.5)
        mismatched = int(np.count_nonzero(mask != expected))
        # Batched and single-patch kernels may round differently right at the threshold
        assert mismatched <= 5, f"{mismatched} pixels differ"

    def test_deterministic(self, toy_model):
        image = np.random.default_rng(6).integers(0, 256, (256, 384)).astype(np.uint8)

        first = segment_image(toy_model, image)
        second = segment_image(toy_model, image)

        assert np.array_equal(first[0], second[0])
        assert np.array_equal(first[1], second[1])

    def test_patch_size_must_match_model(self, toy_model):
        with pytest.raises(ValidationError):
            segment_image(toy_model, np.zeros((256, 256), np.uint8), TilingConfig(patch_size=128, stride=64))

    def test_large_image_patch_count(self):
        """4096 x 4096 at patch and stride 256 is a 16 x 16 grid"""
        assert len(build_grid((4096, 4096), 256, 256).origins) == 256


@pytest.fixture(scope="module")
def trained_disk_model(tmp_path_factory):
    """Toy model fine-tuned briefly on disks"""
    root = tmp_path_factory.mktemp("inference")
    dataset = write_disks_dataset(str(root / "raw"), count=16, size=256, seed=7)
    model_config = ModelConfig.from_preset(Backbone.TOY, seed=0)
    train_config = TrainConfig(learning_rate=1e-3, batch_size=4, max_epochs=8, seed=0)
    _, best = fine_tune(dataset, model_config, train_config, str(root / "run"))
    model, _ = restore_model(build_model(model_config), best)
    return model


@pytest.mark.slow
class TestTrainedDisks:
    """Inference with a decoder fine-tuned on disks"""

    def test_disk_interior_more_probable(self, trained_disk_model):
        image, mask = disk_pair((256, 256), (128, 128), 50, noise_seed=11)

        probability = predict_patch(trained_disk_model, normalize_patch(image))

        assert probability[mask > 0].mean() > probability[mask == 0].mean()

    def test_overlap_not_worse_than_partition(self, trained_disk_model):
        image, truth = disk_pair((512, 512), (250, 260), 120, noise_seed=12)

        overlapped, _ = segment_image(trained_disk_model, image, TilingConfig(stride=128))
        partitioned, _ = segment_image(trained_disk_model, image, TilingConfig(stride=256))

        assert dice(overlapped, truth) >= dice(partitioned, truth)


class TestWriteOutputs:
    """
    Test Suite for write_outputs
    """

    @pytest.fixture
    def arrays(self):
        image, truth = disk_pair((64, 48), (30, 20), 10)
        probability = truth * 0.9 + 0.05
        return image, probability, (probability > 0.5).astype(np.uint8), truth

    def test_png_outputs(self, arrays, tmp_path):
        image, probability, mask, truth = arrays

        paths = write_outputs("slice", image, probability, mask, str(tmp_path), OutputFormat.PNG, truth)

        assert set(paths) == {"mask", "probability_png", "figure"}
        assert all(os.path.isfile(path) for path in paths.values())
        assert np.allclose(load_probability_png(paths["probability_png"]), probability, atol=1e-4)

    def test_both_formats(self, arrays, tmp_path):
        image, probability, mask, _ = arrays

        paths = write_outputs("slice", image, probability, mask, str(tmp_path), OutputFormat.BOTH)

        frame = pd.read_csv(paths["probability_csv"], header=None)
        assert frame.shape == (64, 48)
        assert os.path.isfile(paths["probability_png"])

    def test_unknown_format(self, arrays, tmp_path):
        image, probability, mask, _ = arrays

        with pytest.raises(ValidationError):
            write_outputs("slice", image, probability, mask, str(tmp_path), "tiff")
