"""
Static figures: loss curves and side-by-side segmentation panels
"""

import logging
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

logger = logging.getLogger(__name__)

# Leave out the library version stamp so reruns produce the same file
_PNG_METADATA = {"Software": None}


def save_loss_curve(epochs, train_loss, val_loss, path, title=None):
    """Training and validation loss versus epochs"""
    fig, ax = plt.subplots(figsize=(6, 4), dpi=100)
    ax.plot(epochs, train_loss, marker="o", markersize=3, label="Training loss")
    ax.plot(epochs, val_loss, marker="o", markersize=3, label="Validation loss")
    ax.set_xlabel("Epoch")
    ax.set_ylabel("Loss")
    ax.set_title(title or "Training and validation loss")
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    _save(fig, path)
    return path


def save_comparison(image, probability, mask, path, truth=None, title=None):
    """
    Original | probability map | binary prediction, plus ground truth when given
    """
    panels = [
        ("Image", image, "gray", None),
        ("Probability map", probability, "viridis", (0.0, 1.0)),
        ("Prediction", mask, "gray", (0, 1)),
    ]
    if truth is not None:
        panels.append(("Ground truth", truth, "gray", (0, 1)))

    fig, axes = plt.subplots(1, len(panels), figsize=(4 * len(panels), 4), dpi=100)
    for ax, (label, data, cmap, limits) in zip(axes, panels):
        vmin, vmax = limits if limits is not None else (None, None)
        shown = ax.imshow(data, cmap=cmap, vmin=vmin, vmax=vmax)
        ax.set_title(label)
        ax.axis("off")
        if label == "Probability map":
            fig.colorbar(shown, ax=ax, fraction=0.046, pad=0.04)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    _save(fig, path)
    return path


def _save(fig, path):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fig.savefig(path, metadata=_PNG_METADATA)
    plt.close(fig)
    logger.info(f"Figure written to {path}")
