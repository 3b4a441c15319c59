"""Constants module"""

from .presets import (
    Backbone,
    BlendWindow,
    SourceTag,
    RunMode,
    IsodataMode,
    PromptMode,
    Aggregation,
    OutputFormat,
    ExitCode,
    BACKBONE_PRESETS,
    REFERENCE_TRAINABLE_PARAMETERS,
    NAME_MAP_FILENAME,
    IMAGE_SUFFIXES,
)

__all__ = [
    "Backbone",
    "BlendWindow",
    "SourceTag",
    "RunMode",
    "IsodataMode",
    "PromptMode",
    "Aggregation",
    "OutputFormat",
    "ExitCode",
    "BACKBONE_PRESETS",
    "REFERENCE_TRAINABLE_PARAMETERS",
    "NAME_MAP_FILENAME",
    "IMAGE_SUFFIXES",
]
