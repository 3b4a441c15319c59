"""
Training samples: patch records, the prepared-dataset layout, splitting and loaders
"""

import logging
import math
import os
import zlib
from dataclasses import dataclass

import numpy as np
import pandas as pd
import torch
from torch.utils.data import DataLoader, Dataset, DistributedSampler

from constants import PromptMode, SourceTag
from core_imaging import (
    discover_pairs,
    load_grayscale,
    load_mask,
    normalize_mask,
    normalize_patch,
    save_grayscale,
    save_mask,
    select_patch_indices,
    tile_image,
)
from prompts import BoundingBox, bounding_box_from_mask, bounding_boxes_per_component
from utils.errors import EmptyDatasetError, LayoutError, ValidationError
from utils.manifest import read_manifest, write_manifest

logger = logging.getLogger(__name__)

PREPARED_MANIFEST = "manifest.json"
PREPARED_RECORDS = "records.csv"
RECORD_COLUMNS = ["name", "source", "x_min", "y_min", "x_max", "y_max"]


@dataclass(frozen=True, eq=False)
class SampleRecord:
    """One training patch: 8-bit image, binary mask, box prompt and source tag"""

    name: str
    image: np.ndarray
    mask: np.ndarray
    box: BoundingBox
    source: str = SourceTag.CT

    def __post_init__(self):
        if self.image.shape != self.mask.shape or self.image.ndim != 2:
            raise ValidationError(
                f"Record {self.name}: image {self.image.shape} and mask "
                f"{self.mask.shape} disagree"
            )
        if not np.isin(self.mask, (0, 1)).all():
            raise ValidationError(f"Record {self.name}: mask is not binary")
        self.box.validate(*self.mask.shape)


class PatchDataset(Dataset):
    """Yields (image [1,P,P] in [0,1], mask [1,P,P], box [4]) float32 tensors"""

    def __init__(self, records):
        self.records = list(records)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, index):
        record = self.records[index]
        image = torch.from_numpy(normalize_patch(record.image))[None]
        mask = torch.from_numpy(record.mask.astype(np.float32))[None]
        box = torch.tensor(record.box.as_tuple(), dtype=torch.float32)
        return image, mask, box


def records_from_image(
    name,
    image,
    mask,
    patch_size,
    source=SourceTag.CT,
    min_foreground_fraction=0.01,
    prompt_mode=PromptMode.PATCH,
    jitter=0,
    seed=0,
):
    """
    Patchify one image/mask pair, select informative patches, attach box prompts
    """
    image = np.asarray(image, dtype=np.uint8)
    mask = normalize_mask(mask)
    if image.shape != mask.shape:
        raise ValidationError(
            f"{name}: image {image.shape} and mask {mask.shape} differ in shape"
        )
    image_patches, grid = tile_image(image, patch_size, patch_size)
    mask_patches, _ = tile_image(mask, patch_size, patch_size)
    keep = select_patch_indices(mask_patches, min_foreground_fraction)

    records = []
    for index in keep:
        row, col = grid.origins[index]
        stem = f"{name}_r{row:05d}_c{col:05d}"
        rng = np.random.default_rng([seed, zlib.crc32(name.encode("utf-8")), index])
        if prompt_mode == PromptMode.COMPONENT:
            components = bounding_boxes_per_component(mask_patches[index], jitter, rng)
            for number, (box, component) in enumerate(components):
                records.append(
                    SampleRecord(
                        f"{stem}_k{number:03d}", image_patches[index], component, box, source
                    )
                )
        else:
            box = bounding_box_from_mask(mask_patches[index], jitter, rng)
            records.append(
                SampleRecord(stem, image_patches[index], mask_patches[index], box, source)
            )
    return records, len(grid.origins)


def build_records(pairs, patch_size, data_config, jitter=0, seed=0):
    """
    load -> pad -> patchify -> select -> box prompts for a list of ImagePair

    Raises:
        EmptyDatasetError: no patch survives selection
    """
    records, candidates = [], 0
    for pair in pairs:
        image = load_grayscale(pair.image_path)
        mask = load_mask(pair.mask_path)
        pair_records, count = records_from_image(
            pair.name,
            image,
            mask,
            patch_size,
            source=pair.source,
            min_foreground_fraction=data_config.min_foreground_fraction,
            prompt_mode=data_config.prompt_mode,
            jitter=jitter,
            seed=seed,
        )
        records.extend(pair_records)
        candidates += count

    logger.info(f"Selected {len(records)} training samples from {candidates} patches")
    if not records:
        raise EmptyDatasetError(
            f"No patch passed selection (min foreground fraction "
            f"{data_config.min_foreground_fraction})"
        )
    return records


def write_prepared(records, directory, summary):
    """Write records as PNG pairs, a records CSV and a manifest"""
    rows = []
    for record in records:
        save_grayscale(os.path.join(directory, "images", f"{record.name}.png"), record.image)
        save_mask(os.path.join(directory, "masks", f"{record.name}.png"), record.mask)
        rows.append([record.name, record.source, *record.box.as_tuple()])
    pd.DataFrame(rows, columns=RECORD_COLUMNS).to_csv(
        os.path.join(directory, PREPARED_RECORDS), index=False
    )
    return write_manifest(os.path.join(directory, PREPARED_MANIFEST), summary)


def is_prepared(directory):
    return os.path.isfile(os.path.join(directory, PREPARED_MANIFEST)) and os.path.isfile(
        os.path.join(directory, PREPARED_RECORDS)
    )


def load_prepared(directory, patch_size=None):
    """
    Read a dataset written by write_prepared

    Raises:
        LayoutError: directory is not a prepared dataset
    """
    if not is_prepared(directory):
        raise LayoutError(f"No prepared dataset in {directory}; run `prepare` first")
    manifest = read_manifest(os.path.join(directory, PREPARED_MANIFEST))
    prepared_size = manifest.get("data", {}).get("patch_size")
    if patch_size is not None and prepared_size not in (None, patch_size):
        raise ValidationError(
            f"Dataset was prepared with patch size {prepared_size}, model expects {patch_size}"
        )

    table = pd.read_csv(os.path.join(directory, PREPARED_RECORDS), dtype={"name": str})
    records = []
    for row in table.itertuples(index=False):
        records.append(
            SampleRecord(
                name=row.name,
                image=load_grayscale(os.path.join(directory, "images", f"{row.name}.png")),
                mask=load_mask(os.path.join(directory, "masks", f"{row.name}.png")),
                box=BoundingBox(int(row.x_min), int(row.y_min), int(row.x_max), int(row.y_max)),
                source=SourceTag.parse(row.source) or SourceTag.CT,
            )
        )
    if not records:
        raise EmptyDatasetError(f"Prepared dataset {directory} holds no records")
    logger.info(f"Loaded {len(records)} prepared samples from {directory}")
    return records


def load_records(dataset_path, patch_size, data_config, jitter=0, seed=0):
    """Prepared datasets are read as-is; raw images/masks layouts are patchified"""
    if is_prepared(dataset_path):
        return load_prepared(dataset_path, patch_size)
    pairs = discover_pairs(dataset_path, data_config.default_source)
    return build_records(pairs, patch_size, data_config, jitter=jitter, seed=seed)


def _train_count(size, ratio):
    count = math.floor(ratio * size + 1e-9)
    if size >= 2:
        # Both sides keep at least one sample
        count = min(max(count, 1), size - 1)
    return count


def split_dataset(records, ratio=0.8, seed=0):
    """
    Seeded shuffle and split into (train, validation)

    When more than one source tag is present the split is done per tag, so
    every tag keeps the same train fraction.

    Raises:
        ValidationError: fewer than two records
    """
    if len(records) < 2:
        raise ValidationError("Need at least two records to split")
    if not 0.0 < ratio < 1.0:
        raise ValidationError("ratio must lie in (0, 1)")

    rng = np.random.default_rng(seed)
    strata = {}
    for index, record in enumerate(records):
        strata.setdefault(getattr(record, "source", None), []).append(index)
    groups = [strata[key] for key in sorted(strata, key=str)]
    if len(groups) == 1:
        groups = [list(range(len(records)))]

    train, validation = [], []
    for group in groups:
        order = [group[position] for position in rng.permutation(len(group))]
        count = _train_count(len(group), ratio)
        train.extend(records[index] for index in order[:count])
        validation.extend(records[index] for index in order[count:])

    logger.info(f"Split {len(records)} samples into {len(train)} train / {len(validation)} val")
    return train, validation


def make_loader(records, batch_size, shuffle, seed=0, rank=0, world_size=1):
    """
    DataLoader over records; with several workers each rank reads a disjoint shard
    """
    dataset = PatchDataset(records)
    if world_size > 1:
        sampler = DistributedSampler(
            dataset, num_replicas=world_size, rank=rank, shuffle=shuffle, seed=seed
        )
        return DataLoader(dataset, batch_size=batch_size, sampler=sampler, num_workers=0)
    generator = torch.Generator()
    generator.manual_seed(seed)
    return DataLoader(
        dataset,
        batch_size=batch_size,
        shuffle=shuffle,
        generator=generator,
        num_workers=0,
    )
