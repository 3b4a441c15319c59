"""
Decoder fine-tuning loop: epochs, plateau schedule, early stop and best checkpoint
"""

import json
import logging
import math
import os

import numpy as np
import pandas as pd
import torch
import torch.multiprocessing as mp

from config import AppConfig, DataConfig
from constants import RunMode
from metrics import dice
from segmodel import build_model, count_trainable, freeze_encoders
from utils.errors import DivergenceError, ValidationError
from utils.seeding import seed_everything

from .checkpoint import save_checkpoint
from .dataset import load_records, make_loader, split_dataset
from .distributed import (
    any_worker,
    average_gradients,
    broadcast_parameters,
    is_distributed,
    reduce_mean,
    setup_distributed,
    teardown_distributed,
)
from .loss import dice_ce_loss
from .schedule import EpochRecord, TrainingState, early_stop, plateau_step

logger = logging.getLogger(__name__)

ADAM_BETAS = (0.9, 0.999)
HISTORY_COLUMNS = ["epoch", "train_loss", "val_loss", "lr", "val_dice"]
HISTORY_FILENAME = "history.csv"
STATE_FILENAME = "training_state.json"
BEST_CHECKPOINT_DIR = os.path.join("checkpoints", "best")
DICE_THRESHOLD = 0.5


def _device(model):
    return next(model.parameters()).device


def run_epoch(model, batches, optimizer=None, mode=RunMode.TRAIN):
    """
    One pass over batches of (images, masks, boxes)

    Train mode runs forward, loss, backward and an optimizer step per batch.
    Validate mode runs forward and loss under no_grad and touches no weight
    or optimizer statistic.

    Returns:
        Mean of the per-batch losses (averaged over workers when distributed)

    Raises:
        ValidationError: no batches, or train mode without an optimizer
        DivergenceError: a batch produced a non-finite loss
    """
    if mode not in RunMode.all():
        raise ValidationError(f"Unknown mode '{mode}', expected one of {RunMode.all()}")
    training = mode == RunMode.TRAIN
    if training and optimizer is None:
        raise ValidationError("Train mode needs an optimizer")

    if training:
        model.mask_decoder.train()
    else:
        model.eval()
    device = _device(model)

    losses = []
    for number, (images, masks, boxes) in enumerate(batches):
        images, masks, boxes = images.to(device), masks.to(device), boxes.to(device)
        if training:
            optimizer.zero_grad(set_to_none=True)
            loss = dice_ce_loss(model(images, boxes), masks)
            _check_finite(loss, number)
            loss.backward()
            if is_distributed():
                average_gradients(model)
            optimizer.step()
        else:
            with torch.no_grad():
                loss = dice_ce_loss(model(images, boxes), masks)
            _check_finite(loss, number)
        losses.append(float(loss.item()))

    model.eval()
    if not losses:
        raise ValidationError("Cannot run an epoch over an empty batch list")
    return reduce_mean(sum(losses) / len(losses))


def _check_finite(loss, batch_number):
    # Collective on every batch; all workers raise together
    local = not bool(torch.isfinite(loss).all())
    if any_worker(local):
        raise DivergenceError(
            f"Non-finite loss at batch {batch_number}"
            + (f" ({loss.item()})" if local else " on another worker"),
            details={"batch": batch_number},
        )


def validation_dice(model, batches, threshold=DICE_THRESHOLD):
    """Mean per-patch Dice of thresholded predictions"""
    model.eval()
    device = _device(model)
    scores = []
    with torch.no_grad():
        for images, masks, boxes in batches:
            probability = torch.sigmoid(model(images.to(device), boxes.to(device)))
            predicted = (probability > threshold).cpu().numpy()
            truth = masks.numpy() > 0.5
            scores.extend(dice(p[0], t[0]) for p, t in zip(predicted, truth))
    if not scores:
        return math.nan
    return reduce_mean(float(np.mean(scores)))


def write_history_csv(state, path):
    """epoch, train_loss, val_loss, lr, val_dice per completed epoch"""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    rows = [
        [record.epoch, record.train_loss, record.val_loss, record.lr, record.val_dice]
        for record in state.history
    ]
    pd.DataFrame(rows, columns=HISTORY_COLUMNS).to_csv(path, index=False)
    return path


def read_history_csv(path):
    """
    Read a history CSV

    Raises:
        ValidationError: a required column is missing
    """
    frame = pd.read_csv(path)
    missing = [column for column in ("epoch", "train_loss", "val_loss") if column not in frame]
    if missing:
        raise ValidationError(f"History {path} lacks columns {missing}")
    return frame


def write_training_state(state, path):
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(state.to_dict(), handle, indent=2, sort_keys=True)
    return path


def read_training_state(path):
    with open(path, "r", encoding="utf-8") as handle:
        return TrainingState.from_dict(json.load(handle))


def _train(model_config, train_config, train_records, val_records, out_dir, rank=0, size=1):
    seed_everything(train_config.seed)
    model = freeze_encoders(build_model(model_config)).to(torch.device(AppConfig.DEVICE))
    broadcast_parameters(model)
    trainable = [parameter for parameter in model.parameters() if parameter.requires_grad]
    optimizer = torch.optim.Adam(
        trainable, lr=train_config.learning_rate, betas=ADAM_BETAS, weight_decay=0.0
    )
    logger.info(f"Fine-tuning {count_trainable(model)} decoder parameters")

    train_loader = make_loader(
        train_records, train_config.batch_size, True, train_config.seed, rank, size
    )
    val_loader = make_loader(
        val_records, train_config.batch_size, False, train_config.seed, rank, size
    )
    best_path = os.path.join(out_dir, BEST_CHECKPOINT_DIR)
    state = TrainingState(current_lr=train_config.learning_rate)

    for epoch in range(1, train_config.max_epochs + 1):
        if hasattr(train_loader.sampler, "set_epoch"):
            train_loader.sampler.set_epoch(epoch)
        lr_used = state.current_lr
        train_loss = run_epoch(model, train_loader, optimizer, RunMode.TRAIN)
        val_loss = run_epoch(model, val_loader, mode=RunMode.VALIDATE)
        val_dice = validation_dice(model, val_loader)

        previous_best = state.best_val_loss
        state = plateau_step(state, val_loss, train_config)
        state.history.append(
            EpochRecord(epoch, train_loss, val_loss, lr_used, val_dice, state.best_val_loss)
        )
        for group in optimizer.param_groups:
            group["lr"] = state.current_lr

        logger.info(
            f"Epoch {epoch}/{train_config.max_epochs}: train {train_loss:.6f}, "
            f"val {val_loss:.6f}, dice {val_dice:.4f}, lr {lr_used:.3e}"
        )
        if state.best_val_loss < previous_best:
            state.best_epoch = epoch
            state.best_checkpoint_path = best_path
            if rank == 0:
                save_checkpoint(model, state, best_path, epoch, val_loss)

        if early_stop(state, train_config.early_stop_patience):
            logger.info(
                f"Early stop after epoch {epoch}: no improvement for "
                f"{state.epochs_since_improvement} epochs"
            )
            break

    if rank == 0:
        write_history_csv(state, os.path.join(out_dir, HISTORY_FILENAME))
        write_training_state(state, os.path.join(out_dir, STATE_FILENAME))
    return state


def _distributed_worker(rank, size, model_config, train_config, train_records, val_records, out_dir):
    setup_distributed(rank, size)
    try:
        _train(model_config, train_config, train_records, val_records, out_dir, rank, size)
    finally:
        teardown_distributed()


def fine_tune(dataset_path, model_config, train_config, out_dir, data_config=None, records=None):
    """
    Fine-tune the mask decoder with frozen encoders

    load -> patchify -> select -> box prompts -> split -> epochs with plateau
    schedule and early stop. The best checkpoint, the history CSV and the
    final training state are written under out_dir.

    Args:
        dataset_path: Prepared dataset or raw images/masks layout
        model_config: ModelConfig
        train_config: TrainConfig; workers > 1 spawns data-parallel workers
        out_dir: Output directory
        data_config: DataConfig for raw layouts
        records: Already built SampleRecords; dataset_path is then ignored

    Returns:
        (TrainingState, best checkpoint directory)

    Raises:
        EmptyDatasetError: no patch passed selection
    """
    model_config.validate()
    train_config.validate()
    data_config = data_config or DataConfig()
    seed_everything(train_config.seed)
    os.makedirs(out_dir, exist_ok=True)

    if records is None:
        records = load_records(
            dataset_path,
            model_config.patch_input_size,
            data_config,
            jitter=train_config.box_jitter,
            seed=train_config.seed,
        )
    train_records, val_records = split_dataset(
        records, train_config.split_ratio, train_config.seed
    )

    if train_config.workers > 1:
        logger.info(f"Spawning {train_config.workers} data-parallel workers")
        mp.spawn(
            _distributed_worker,
            args=(
                train_config.workers,
                model_config,
                train_config,
                train_records,
                val_records,
                out_dir,
            ),
            nprocs=train_config.workers,
            join=True,
        )
        state = read_training_state(os.path.join(out_dir, STATE_FILENAME))
    else:
        state = _train(model_config, train_config, train_records, val_records, out_dir)

    logger.info(
        f"Training finished after {state.completed_epochs} epochs; best val_loss "
        f"{state.best_val_loss:.6f} at epoch {state.best_epoch}"
    )
    return state, state.best_checkpoint_path
