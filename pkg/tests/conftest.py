"""
Pytest Configuration and Shared Fixtures
This file contains common test fixtures used across multiple test modules
"""

# Import pytest framework for test configuration and fixtures
import pytest

# Import sys and os for path manipulation
import sys
import os

# Import numpy and Pillow to build synthetic datasets on disk
import numpy as np
from PIL import Image

# Add the parent directory to the Python path
# This allows importing modules from the project root
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

# Import configuration types and the model factory
from config import ModelConfig, TrainConfig  # noqa: E402
from constants import Backbone  # noqa: E402
from segmodel import build_model, freeze_encoders  # noqa: E402


def disk_pair(size, center, radius, foreground=200, background=40, noise_seed=None):
    """
    Synthetic grayscale disk and its mask

    Args:
        size: (height, width) of the image
        center: (row, col) of the disk
        radius: Disk radius in pixels
        foreground: Intensity inside the disk
        background: Intensity outside the disk
        noise_seed: Adds mild seeded noise when given

    Returns:
        (uint8 image, uint8 {0,1} mask)
    """
    rows, cols = np.mgrid[: size[0], : size[1]]
    mask = ((rows - center[0]) ** 2 + (cols - center[1]) ** 2 <= radius**2).astype(np.uint8)
    image = np.where(mask > 0, foreground, background).astype(np.float64)
    if noise_seed is not None:
        image += np.random.default_rng(noise_seed).normal(0.0, 8.0, size)
    return np.clip(np.rint(image), 0, 255).astype(np.uint8), mask


def write_disks_dataset(root, count, size=256, seed=0, source_dirs=None):
    """
    Write an images/ + masks/ layout of random disks

    Args:
        root: Dataset root directory
        count: Number of images per layout
        size: Square image side
        seed: Seed for disk placement and noise
        source_dirs: Optional list of per-source subdirectories (e.g. ["CT", "SEM"])

    Returns:
        The dataset root
    """
    rng = np.random.default_rng(seed)
    for subdir in source_dirs or [""]:
        images_dir = os.path.join(root, subdir, "images")
        masks_dir = os.path.join(root, subdir, "masks")
        os.makedirs(images_dir, exist_ok=True)
        os.makedirs(masks_dir, exist_ok=True)
        for index in range(count):
            radius = int(rng.integers(size // 8, size // 4))
            center = tuple(int(value) for value in rng.integers(radius, size - radius, 2))
            image, mask = disk_pair((size, size), center, radius, noise_seed=int(rng.integers(1 << 30)))
            name = f"{subdir or 'disk'}_{index:03d}.png"
            Image.fromarray(image).save(os.path.join(images_dir, name))
            Image.fromarray(mask * 255).save(os.path.join(masks_dir, name))
    return root


@pytest.fixture
def toy_config():
    """
    Toy Model Configuration Fixture

    Returns:
        ModelConfig: the toy preset (256 input, 16x16 token grid) with seed 0
    """
    return ModelConfig.from_preset(Backbone.TOY, seed=0)


@pytest.fixture
def toy_model(toy_config):
    """
    Toy Model Fixture

    Returns:
        PromptableSegmenter: toy model with frozen encoders
    """
    return freeze_encoders(build_model(toy_config))


@pytest.fixture
def fast_train_config():
    """Short training schedule used by loop and command tests"""
    return TrainConfig(
        learning_rate=1e-3,
        batch_size=4,
        max_epochs=2,
        split_ratio=0.75,
        seed=0,
        min_lr=1e-7,
    )


@pytest.fixture
def disks_dataset(tmp_path):
    """
    Raw Dataset Fixture

    Returns:
        str: root of an images/ + masks/ layout holding 8 disk images of 256x256
    """
    return write_disks_dataset(str(tmp_path / "raw"), count=8, size=256, seed=1)


@pytest.fixture
def mixed_dataset(tmp_path):
    """
    Multi-Source Dataset Fixture

    Returns:
        str: root holding CT/ and SEM/ layouts with 6 disk images each
    """
    return write_disks_dataset(
        str(tmp_path / "mixed"), count=6, size=256, seed=2, source_dirs=["CT", "SEM"]
    )
