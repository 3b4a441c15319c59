"""
Evaluation reports over sets of (prediction, truth) mask pairs
"""

import logging
import os
from dataclasses import dataclass, field
from typing import List

import pandas as pd

from constants import Aggregation
from utils.errors import ValidationError

from .scores import dice_from_counts, iou_from_counts, overlap_counts

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["name", "iou", "dice", "mae", "n_pixels"]
AGGREGATE_ROW = "aggregate"


@dataclass(frozen=True)
class ImageScore:
    name: str
    iou: float
    dice: float
    mae: float
    n_pixels: int


@dataclass
class MetricsReport:
    """Aggregate IoU, Dice and MAE plus the per-image breakdown"""

    iou: float
    dice: float
    mae: float
    n_pixels: int
    per_image: List[ImageScore] = field(default_factory=list)
    aggregation: str = Aggregation.PER_IMAGE

    def to_frame(self):
        """One row per image followed by the aggregate row"""
        rows = [
            [score.name, score.iou, score.dice, score.mae, score.n_pixels]
            for score in self.per_image
        ]
        rows.append([AGGREGATE_ROW, self.iou, self.dice, self.mae, self.n_pixels])
        return pd.DataFrame(rows, columns=REPORT_COLUMNS)

    def to_csv(self, path):
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        self.to_frame().to_csv(path, index=False)
        return path

    def format_table(self):
        """Human-readable table for the terminal"""
        table = self.to_frame().to_string(
            index=False, float_format=lambda value: f"{value:.4f}"
        )
        return f"{table}\n(aggregation: {self.aggregation})"


def evaluate_set(pairs, aggregation=Aggregation.PER_IMAGE):
    """
    Score a list of (prediction, truth, name) triples

    Args:
        pairs: Iterable of (prediction mask, truth mask, name)
        aggregation: per-image (unweighted mean over images) or pooled
            (scores of all pixels taken together)

    Returns:
        MetricsReport

    Raises:
        ValidationError: no pairs, unknown aggregation or mismatched shapes
    """
    if aggregation not in Aggregation.all():
        raise ValidationError(
            f"Unknown aggregation '{aggregation}', expected one of {Aggregation.all()}"
        )

    scores, totals = [], [0, 0, 0, 0, 0, 0]
    for prediction, truth, name in pairs:
        counts = overlap_counts(prediction, truth)
        intersection, union, predicted, reference, differing, pixels = counts
        scores.append(
            ImageScore(
                name=str(name),
                iou=iou_from_counts(intersection, union),
                dice=dice_from_counts(intersection, predicted, reference),
                mae=differing / pixels,
                n_pixels=pixels,
            )
        )
        totals = [total + count for total, count in zip(totals, counts)]

    if not scores:
        raise ValidationError("Nothing to evaluate: empty list of mask pairs")

    intersection, union, predicted, reference, differing, pixels = totals
    if aggregation == Aggregation.POOLED:
        report = MetricsReport(
            iou=iou_from_counts(intersection, union),
            dice=dice_from_counts(intersection, predicted, reference),
            mae=differing / pixels,
            n_pixels=pixels,
            per_image=scores,
            aggregation=aggregation,
        )
    else:
        count = len(scores)
        report = MetricsReport(
            iou=sum(score.iou for score in scores) / count,
            dice=sum(score.dice for score in scores) / count,
            mae=sum(score.mae for score in scores) / count,
            n_pixels=pixels,
            per_image=scores,
            aggregation=aggregation,
        )

    logger.info(
        f"Evaluated {len(scores)} images: IoU {report.iou:.4f}, "
        f"Dice {report.dice:.4f}, MAE {report.mae:.4f}"
    )
    return report
