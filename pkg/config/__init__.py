"""Configuration module"""

from .settings import AppConfig, WeightsConfig
from .pipeline import (
    DataConfig,
    ModelConfig,
    TrainConfig,
    TilingConfig,
    PipelineConfig,
)

__all__ = [
    "AppConfig",
    "WeightsConfig",
    "DataConfig",
    "ModelConfig",
    "TrainConfig",
    "TilingConfig",
    "PipelineConfig",
]
