"""
infer: tiled segmentation of an image or a directory of images
"""

import logging
import os

import click
import torch

from config import AppConfig
from constants import BlendWindow, OutputFormat
from core_imaging import list_images, load_grayscale, load_mask
from inference import segment_image, write_outputs
from segmodel import build_model
from training import restore_model
from utils import (
    ImageFormatError,
    LayoutError,
    PartialFailureError,
    ValidationError,
    handle_errors,
    validate_paths,
)

from .common import finish_run, load_pipeline, log_banner, pipeline_options

logger = logging.getLogger(__name__)


def _inputs(input_path):
    if os.path.isdir(input_path):
        paths = list_images(input_path)
        if not paths:
            raise LayoutError(f"No images in {input_path}")
        return paths
    return [input_path]


def _truth_for(truth_dir, stem):
    if truth_dir is None:
        return None
    for path in list_images(truth_dir):
        if os.path.splitext(os.path.basename(path))[0] == stem:
            return load_mask(path)
    logger.warning(f"No ground truth for {stem} in {truth_dir}")
    return None


@click.command("infer")
@pipeline_options
@click.argument("input_path", type=click.Path())
@click.option("--checkpoint", type=click.Path(file_okay=False), required=True,
              help="Checkpoint directory written by train")
@click.option("--stride", type=int, default=None)
@click.option("--threshold", type=float, default=None)
@click.option("--window", type=click.Choice(BlendWindow.all()), default=None)
@click.option("--batch-size", "batch_size", type=int, default=None)
@click.option("--format", "output_format", type=click.Choice(OutputFormat.all()),
              default=OutputFormat.PNG, show_default=True)
@click.option("--truth-dir", "truth_dir", type=click.Path(file_okay=False), default=None,
              help="Ground-truth masks; adds a fourth panel to the figures")
@handle_errors
@validate_paths("config_path", "input_path", "checkpoint", "truth_dir")
def infer(config_path, seed, out_dir, input_path, checkpoint, stride, threshold, window,
          batch_size, output_format, truth_dir):
    """Write masks, probability maps and side-by-side figures"""
    pipeline = load_pipeline(
        config_path, seed, out_dir, stride=stride, threshold=threshold, window=window,
        batch_size=batch_size,
    )
    log_banner("infer", pipeline)
    if pipeline.tiling.patch_size != pipeline.model.patch_input_size:
        raise ValidationError(
            f"Tiling patch size {pipeline.tiling.patch_size} differs from model input "
            f"{pipeline.model.patch_input_size}"
        )

    model = build_model(pipeline.model, pretrained=False)
    model, _ = restore_model(model, checkpoint)
    model.to(torch.device(AppConfig.DEVICE)).eval()

    processed, failures = [], {}
    for path in _inputs(input_path):
        stem = os.path.splitext(os.path.basename(path))[0]
        try:
            image = load_grayscale(path)
            mask, probability = segment_image(model, image, pipeline.tiling)
            write_outputs(
                stem,
                image,
                probability,
                mask,
                pipeline.out_dir,
                output_format,
                truth=_truth_for(truth_dir, stem),
            )
            processed.append(stem)
        except (ImageFormatError, ValidationError, OSError) as e:
            logger.warning(f"Skipping {path}: {str(e)}")
            failures[stem] = str(e)

    finish_run(
        pipeline,
        "infer",
        {
            "checkpoint": os.path.abspath(checkpoint),
            "format": output_format,
            "processed": processed,
            "failed": failures,
        },
    )
    click.echo(f"Segmented {len(processed)} images into {pipeline.out_dir}")
    if failures:
        raise PartialFailureError(
            f"{len(failures)} of {len(failures) + len(processed)} images failed",
            details={"failed": sorted(failures)},
        )
