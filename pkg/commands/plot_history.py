"""
plot-history: loss-curve figure from a history CSV
"""

import os

import click

from training import read_history_csv
from utils import handle_errors, validate_paths
from utils.figures import save_loss_curve

from .common import finish_run, load_pipeline, pipeline_options
from .train import LOSS_CURVE


@click.command("plot-history")
@pipeline_options
@click.argument("history_path", type=click.Path(dir_okay=False))
@click.option("--title", default="Training and validation loss versus epochs", show_default=True)
@handle_errors
@validate_paths("config_path", "history_path")
def plot_history(config_path, seed, out_dir, history_path, title):
    """Training and validation loss versus epochs"""
    pipeline = load_pipeline(config_path, seed, out_dir)
    history = read_history_csv(history_path)
    figure = save_loss_curve(
        history["epoch"].tolist(),
        history["train_loss"].tolist(),
        history["val_loss"].tolist(),
        os.path.join(pipeline.out_dir, LOSS_CURVE),
        title=title,
    )
    finish_run(pipeline, "plot-history", {"history": os.path.abspath(history_path), "epochs": len(history)})
    click.echo(f"Loss curve written to {figure}")
