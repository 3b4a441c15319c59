"""
Plateau learning-rate schedule and early stopping
"""

import copy
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional

logger = logging.getLogger(__name__)

# Smaller changes in validation loss do not count as improvement
IMPROVEMENT_TOLERANCE = 1e-9


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    lr: float
    val_dice: float = math.nan
    # Running best after this epoch
    best_val_loss: float = math.inf


@dataclass
class TrainingState:
    """Scheduler and early-stop bookkeeping plus the best-checkpoint lineage"""

    current_lr: float
    best_val_loss: float = math.inf
    epochs_since_improvement: int = 0
    epochs_since_lr_drop: int = 0
    history: List[EpochRecord] = field(default_factory=list)
    best_checkpoint_path: Optional[str] = None
    best_epoch: Optional[int] = None

    @property
    def completed_epochs(self):
        return len(self.history)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data["history"] = [EpochRecord(**record) for record in data.get("history", [])]
        return cls(**data)


def plateau_step(state, val_loss, config):
    """
    Advance the plateau counters with one validation loss

    Any improvement resets both counters. Otherwise both grow, and once the
    learning-rate counter reaches config.scheduler_patience the rate is
    multiplied by config.scheduler_factor (never below config.min_lr) and
    that counter restarts.

    Returns:
        A new TrainingState; the input is left untouched
    """
    state = copy.deepcopy(state)
    if val_loss < state.best_val_loss - IMPROVEMENT_TOLERANCE:
        state.best_val_loss = float(val_loss)
        state.epochs_since_improvement = 0
        state.epochs_since_lr_drop = 0
        return state

    state.epochs_since_improvement += 1
    state.epochs_since_lr_drop += 1
    if state.epochs_since_lr_drop >= config.scheduler_patience:
        reduced = max(state.current_lr * config.scheduler_factor, config.min_lr)
        if reduced < state.current_lr:
            logger.info(f"Reducing learning rate {state.current_lr:.3e} -> {reduced:.3e}")
        state.current_lr = reduced
        state.epochs_since_lr_drop = 0
    return state


def early_stop(state, patience):
    return state.epochs_since_improvement >= patience
