"""
Per-image output files of an inference run
"""

import logging
import os

import pandas as pd

from constants import OutputFormat
from core_imaging import save_mask, save_probability_png
from utils.errors import ValidationError
from utils.figures import save_comparison

logger = logging.getLogger(__name__)


def write_outputs(stem, image, probability, mask, out_dir, output_format=OutputFormat.PNG, truth=None):
    """
    Write masks/<stem>.png, probability/<stem>.png and/or .csv and figures/<stem>.png

    Returns:
        Dict of written paths keyed by kind
    """
    if output_format not in OutputFormat.all():
        raise ValidationError(
            f"Unknown format '{output_format}', expected one of {OutputFormat.all()}"
        )
    paths = {"mask": os.path.join(out_dir, "masks", f"{stem}.png")}
    save_mask(paths["mask"], mask)

    if output_format in (OutputFormat.PNG, OutputFormat.BOTH):
        paths["probability_png"] = os.path.join(out_dir, "probability", f"{stem}.png")
        save_probability_png(paths["probability_png"], probability)
    if output_format in (OutputFormat.CSV, OutputFormat.BOTH):
        paths["probability_csv"] = os.path.join(out_dir, "probability", f"{stem}.csv")
        os.makedirs(os.path.dirname(paths["probability_csv"]), exist_ok=True)
        pd.DataFrame(probability).to_csv(
            paths["probability_csv"], header=False, index=False, float_format="%.6f"
        )

    paths["figure"] = os.path.join(out_dir, "figures", f"{stem}.png")
    save_comparison(image, probability, mask, paths["figure"], truth=truth, title=stem)
    logger.debug(f"Wrote outputs for {stem}")
    return paths
