"""
train: fine-tune the mask decoder on a prepared dataset
"""

import logging
import os
from dataclasses import replace

import click

from training import fine_tune, load_prepared
from training.loop import HISTORY_FILENAME
from utils import handle_errors, validate_paths
from utils.figures import save_loss_curve

from .common import finish_run, load_pipeline, log_banner, pipeline_options

logger = logging.getLogger(__name__)

LOSS_CURVE = "loss_curve.png"


@click.command("train")
@pipeline_options
@click.option("--dataset", "dataset", type=click.Path(file_okay=False), default=None,
              help="Prepared dataset directory")
@click.option("--workers", type=int, default=None, help="Data-parallel worker count")
@handle_errors
@validate_paths("config_path", "dataset")
def train(config_path, seed, out_dir, dataset, workers):
    """Fine-tune the decoder; writes checkpoint, history CSV and loss curve"""
    pipeline = load_pipeline(config_path, seed, out_dir)
    if workers is not None:
        pipeline = replace(pipeline, train=replace(pipeline.train, workers=workers))
        pipeline.validate()
    dataset = dataset or pipeline.data.dataset_root
    log_banner("train", pipeline)

    records = load_prepared(dataset, pipeline.model.patch_input_size)
    state, best_checkpoint = fine_tune(
        dataset,
        pipeline.model,
        pipeline.train,
        pipeline.out_dir,
        data_config=pipeline.data,
        records=records,
    )

    history = state.history
    save_loss_curve(
        [record.epoch for record in history],
        [record.train_loss for record in history],
        [record.val_loss for record in history],
        os.path.join(pipeline.out_dir, LOSS_CURVE),
        title="Training and validation loss versus epochs",
    )
    finish_run(
        pipeline,
        "train",
        {
            "dataset": os.path.abspath(dataset),
            "samples": len(records),
            "epochs": state.completed_epochs,
            "best_epoch": state.best_epoch,
            "best_val_loss": state.best_val_loss,
            "final_lr": state.current_lr,
            "best_checkpoint": best_checkpoint,
            "history": HISTORY_FILENAME,
        },
    )
    click.echo(f"Best val_loss {state.best_val_loss:.6f} at epoch {state.best_epoch}")
