"""Commands module"""

from .prepare import prepare
from .train import train
from .infer import infer
from .evaluate import evaluate
from .plot_history import plot_history
from .fetch_weights import fetch_weights

__all__ = ["prepare", "train", "infer", "evaluate", "plot_history", "fetch_weights"]
