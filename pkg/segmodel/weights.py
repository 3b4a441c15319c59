"""
Pretrained checkpoint adapter driven by the name-translation manifest
"""

import logging
import os
import re
from dataclasses import dataclass
from typing import Optional, Tuple

import torch

from constants import NAME_MAP_FILENAME
from utils.errors import ChecksumError, IncompatibilityError, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_NAME_MAP = os.path.join(os.path.dirname(__file__), NAME_MAP_FILENAME)

_SLICE = re.compile(r"^(?P<name>.+)\[(?P<start>\d+):(?P<stop>\d+)\]$")


@dataclass(frozen=True)
class NameRule:
    source: str
    target: Optional[str]
    rows: Optional[Tuple[int, int]] = None

    @property
    def is_prefix(self):
        return self.source.endswith(".")


def read_name_map(path=DEFAULT_NAME_MAP):
    """Parse the two-column manifest into rules"""
    rules = []
    with open(path, "r", encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            columns = line.split()
            if len(columns) != 2:
                raise ValidationError(
                    f"{path}:{number}: expected 'source target', got {line!r}"
                )
            source, target = columns
            rows = None
            match = _SLICE.match(source)
            if match:
                source = match.group("name")
                rows = (int(match.group("start")), int(match.group("stop")))
            rules.append(NameRule(source, None if target == "-" else target, rows))
    return rules


def _resolve(name, exact, prefixes):
    if name in exact:
        rule = exact[name]
        return rule, rule.target
    for rule in prefixes:
        if name.startswith(rule.source):
            if rule.target is None:
                return rule, None
            return rule, rule.target + name[len(rule.source):]
    return None, None


def translate_state_dict(published, rules):
    """
    Rename published tensors to the model layout

    Raises:
        IncompatibilityError: a published tensor matches no rule
    """
    exact = {rule.source: rule for rule in rules if not rule.is_prefix}
    prefixes = sorted(
        (rule for rule in rules if rule.is_prefix),
        key=lambda rule: len(rule.source),
        reverse=True,
    )
    translated, unmapped, dropped = {}, [], 0
    for name, tensor in published.items():
        rule, target = _resolve(name, exact, prefixes)
        if rule is None:
            unmapped.append(name)
            continue
        if target is None:
            dropped += 1
            continue
        if rule.rows is not None:
            tensor = tensor[rule.rows[0] : rule.rows[1]]
        translated[target] = tensor

    if unmapped:
        raise IncompatibilityError(
            f"{len(unmapped)} published tensors have no rule in the name map",
            details={"unmapped": unmapped[:20]},
        )
    logger.info(f"Translated {len(translated)} tensors, dropped {dropped}")
    return translated


def _read_checkpoint(path):
    try:
        published = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as e:
        raise ChecksumError(f"Cannot read checkpoint {path}: {str(e)}")
    # Some distributions wrap the tensors
    for key in ("model", "state_dict"):
        if isinstance(published, dict) and isinstance(published.get(key), dict):
            published = published[key]
    return published


def load_pretrained(model, weights_path, name_map_path=DEFAULT_NAME_MAP):
    """
    Load a published checkpoint into the model

    Raises:
        IncompatibilityError: missing, extra or mis-shaped tensors after translation
    """
    published = _read_checkpoint(weights_path)
    translated = translate_state_dict(published, read_name_map(name_map_path))

    expected = model.state_dict()
    missing = sorted(set(expected) - set(translated))
    extra = sorted(set(translated) - set(expected))
    if missing or extra:
        raise IncompatibilityError(
            f"Checkpoint does not fit the model: {len(missing)} missing, "
            f"{len(extra)} extra tensors",
            details={"missing": missing[:20], "extra": extra[:20]},
        )
    mismatched = [
        name
        for name, tensor in translated.items()
        if tuple(tensor.shape) != tuple(expected[name].shape)
    ]
    if mismatched:
        raise IncompatibilityError(
            f"{len(mismatched)} tensors have mismatched shapes",
            details={"mismatched": mismatched[:20]},
        )

    model.load_state_dict(translated, strict=True)
    logger.info(f"Loaded pretrained weights from {weights_path}")
    return model
