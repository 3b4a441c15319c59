"""
evaluate: IoU, Dice and MAE of predicted masks against ground truth
"""

import logging
import os

import click

from constants import Aggregation
from core_imaging import list_images, load_mask
from metrics import evaluate_set
from utils import LayoutError, handle_errors, validate_paths

from .common import finish_run, load_pipeline, log_banner, pipeline_options

logger = logging.getLogger(__name__)

METRICS_CSV = "metrics.csv"


def _stems(directory):
    return {os.path.splitext(os.path.basename(path))[0]: path for path in list_images(directory)}


def matched_pairs(prediction_dir, truth_dir):
    """(prediction path, truth path, stem) for every shared filename stem"""
    # An infer output directory keeps its masks in masks/
    nested = os.path.join(prediction_dir, "masks")
    if os.path.isdir(nested):
        prediction_dir = nested
    predictions, truths = _stems(prediction_dir), _stems(truth_dir)
    shared = sorted(set(predictions) & set(truths))
    if not shared:
        raise LayoutError(
            f"No filename-matched masks between {prediction_dir} and {truth_dir}"
        )
    skipped = len(set(predictions) ^ set(truths))
    if skipped:
        logger.warning(f"{skipped} masks have no counterpart and are ignored")
    return [(predictions[stem], truths[stem], stem) for stem in shared]


@click.command("evaluate")
@pipeline_options
@click.argument("prediction_dir", type=click.Path(file_okay=False))
@click.argument("truth_dir", type=click.Path(file_okay=False))
@click.option("--aggregation", type=click.Choice(Aggregation.all()),
              default=Aggregation.PER_IMAGE, show_default=True)
@handle_errors
@validate_paths("config_path", "prediction_dir", "truth_dir")
def evaluate(config_path, seed, out_dir, prediction_dir, truth_dir, aggregation):
    """Score predictions; writes metrics.csv and prints the table"""
    pipeline = load_pipeline(config_path, seed, out_dir)
    log_banner("evaluate", pipeline)

    pairs = matched_pairs(prediction_dir, truth_dir)
    report = evaluate_set(
        ((load_mask(prediction), load_mask(truth), stem) for prediction, truth, stem in pairs),
        aggregation=aggregation,
    )
    csv_path = report.to_csv(os.path.join(pipeline.out_dir, METRICS_CSV))
    finish_run(
        pipeline,
        "evaluate",
        {
            "predictions": os.path.abspath(prediction_dir),
            "truths": os.path.abspath(truth_dir),
            "aggregation": aggregation,
            "images": len(pairs),
            "iou": report.iou,
            "dice": report.dice,
            "mae": report.mae,
        },
    )
    click.echo(report.format_table())
    logger.info(f"Metrics written to {csv_path}")
