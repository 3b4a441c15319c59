"""Mask-decoder fine-tuning"""

from .dataset import (
    SampleRecord,
    PatchDataset,
    records_from_image,
    build_records,
    write_prepared,
    load_prepared,
    load_records,
    split_dataset,
    make_loader,
)
from .loss import dice_ce_loss
from .schedule import EpochRecord, TrainingState, plateau_step, early_stop
from .checkpoint import save_checkpoint, load_checkpoint, restore_model, read_checkpoint_manifest
from .distributed import (
    any_worker,
    setup_distributed,
    teardown_distributed,
    average_gradients,
    broadcast_parameters,
    reduce_mean,
)
from .loop import (
    run_epoch,
    validation_dice,
    fine_tune,
    write_history_csv,
    read_history_csv,
    read_training_state,
)

__all__ = [
    "SampleRecord",
    "PatchDataset",
    "records_from_image",
    "build_records",
    "write_prepared",
    "load_prepared",
    "load_records",
    "split_dataset",
    "make_loader",
    "dice_ce_loss",
    "EpochRecord",
    "TrainingState",
    "plateau_step",
    "early_stop",
    "save_checkpoint",
    "load_checkpoint",
    "restore_model",
    "read_checkpoint_manifest",
    "setup_distributed",
    "teardown_distributed",
    "any_worker",
    "average_gradients",
    "broadcast_parameters",
    "reduce_mean",
    "run_epoch",
    "validation_dice",
    "fine_tune",
    "write_history_csv",
    "read_history_csv",
    "read_training_state",
]
