"""
prepare: raw images/masks -> selected patch dataset with box prompts
"""

import logging
import os
from dataclasses import replace

import click

from constants import IsodataMode, PromptMode
from core_imaging import (
    binarize_threshold,
    discover_pairs,
    isodata_levels,
    load_grayscale,
    load_mask,
    save_mask,
)
from training import records_from_image, write_prepared
from utils import EmptyDatasetError, handle_errors, validate_paths

from .common import finish_run, load_pipeline, log_banner, pipeline_options

logger = logging.getLogger(__name__)

GENERATED_MASKS = "isodata_masks"


@click.command("prepare")
@pipeline_options
@click.option("--dataset", "dataset", type=click.Path(file_okay=False), default=None,
              help="Raw dataset root (images/ and masks/, or CT/ and SEM/ subdirectories)")
@click.option("--isodata", is_flag=True, help="Derive missing masks by IsoData thresholding")
@click.option("--isodata-mode", type=click.Choice(IsodataMode.all()), default=None)
@click.option("--prompt-mode", type=click.Choice(PromptMode.all()), default=None)
@handle_errors
@validate_paths("config_path", "dataset")
def prepare(config_path, seed, out_dir, dataset, isodata, isodata_mode, prompt_mode):
    """Patchify, select and box-prompt a raw dataset"""
    pipeline = load_pipeline(config_path, seed, out_dir)
    data_values = {"isodata_mode": isodata_mode, "prompt_mode": prompt_mode, "dataset_root": dataset}
    data_config = replace(
        pipeline.data, **{key: value for key, value in data_values.items() if value is not None}
    ).validate()
    pipeline = replace(pipeline, data=data_config)
    log_banner("prepare", pipeline)

    pairs = discover_pairs(data_config.dataset_root, data_config.default_source, require_masks=not isodata)
    images = [load_grayscale(pair.image_path) for pair in pairs]

    thresholds = {}
    if isodata:
        unlabeled = [index for index, pair in enumerate(pairs) if pair.mask_path is None]
        if unlabeled:
            levels = isodata_levels([images[index] for index in unlabeled], data_config.isodata_mode)
            for index, level in zip(unlabeled, levels):
                pair = pairs[index]
                # Generated masks go to the output, inputs stay untouched
                mask_path = os.path.join(pipeline.out_dir, GENERATED_MASKS, f"{pair.name}.png")
                save_mask(mask_path, binarize_threshold(images[index], level))
                pairs[index] = replace(pair, mask_path=mask_path)
                thresholds[pair.name] = int(level)
            logger.info(f"Generated {len(unlabeled)} masks by IsoData ({data_config.isodata_mode})")

    patch_size = pipeline.model.patch_input_size
    records, candidates, selected = [], {}, {}
    for pair, image in zip(pairs, images):
        pair_records, count = records_from_image(
            pair.name,
            image,
            load_mask(pair.mask_path),
            patch_size,
            source=pair.source,
            min_foreground_fraction=data_config.min_foreground_fraction,
            prompt_mode=data_config.prompt_mode,
            jitter=pipeline.train.box_jitter,
            seed=pipeline.seed,
        )
        records.extend(pair_records)
        candidates[pair.source] = candidates.get(pair.source, 0) + count
        selected[pair.source] = selected.get(pair.source, 0) + len(pair_records)

    if not records:
        raise EmptyDatasetError(
            f"No patch passed selection (min foreground fraction "
            f"{data_config.min_foreground_fraction})"
        )

    images_per_source = {}
    for pair in pairs:
        images_per_source[pair.source] = images_per_source.get(pair.source, 0) + 1
    summary = {
        "patch_size": patch_size,
        "min_foreground_fraction": data_config.min_foreground_fraction,
        "prompt_mode": data_config.prompt_mode,
        "box_jitter": pipeline.train.box_jitter,
        "images": images_per_source,
        "candidate_patches": candidates,
        "selected_samples": selected,
        "isodata_mode": data_config.isodata_mode if thresholds else None,
        "isodata_thresholds": thresholds,
    }
    write_prepared(records, pipeline.out_dir, summary)
    finish_run(pipeline, "prepare")

    logger.info(f"Prepared {len(records)} samples from {len(pairs)} images into {pipeline.out_dir}")
    click.echo(f"Prepared {len(records)} samples in {pipeline.out_dir}")
