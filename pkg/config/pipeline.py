"""
Pipeline configuration: the [data], [model], [train] and [tiling] sections

The file format is INI. Values left out of the file keep their defaults, and
command-line flags override both.
"""

import configparser
import dataclasses
import logging
import os
from dataclasses import dataclass, field, fields, replace
from typing import Optional, Tuple

from constants import (
    Backbone,
    BlendWindow,
    IsodataMode,
    PromptMode,
    SourceTag,
    BACKBONE_PRESETS,
)
from utils.errors import ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelConfig:
    """Architecture of the promptable segmentation model"""

    backbone: str = Backbone.TOY
    patch_input_size: int = 256
    encoder_image_size: int = 256
    token_size: int = 16
    in_chans: int = 1
    encoder_embed_dim: int = 32
    encoder_depth: int = 4
    encoder_heads: int = 4
    window_size: int = 0
    global_attn_indexes: Tuple[int, ...] = ()
    decoder_dim: int = 32
    decoder_depth: int = 2
    decoder_heads: int = 4
    decoder_mlp_dim: int = 64
    pixel_mean: Tuple[float, ...] = (0.5,)
    pixel_std: Tuple[float, ...] = (0.5,)
    seed: int = 0

    @classmethod
    def from_preset(cls, backbone, **overrides):
        """Build a config from the backbone preset, then apply overrides"""
        if backbone not in BACKBONE_PRESETS:
            raise ValidationError(
                f"Unknown backbone '{backbone}', expected one of {Backbone.all()}"
            )
        values = dict(BACKBONE_PRESETS[backbone])
        values.update(overrides)
        return cls(backbone=backbone, **values)

    @property
    def embedding_grid(self):
        side = self.encoder_image_size // self.token_size
        return (side, side)

    def validate(self):
        if self.backbone not in Backbone.all():
            raise ValidationError(f"Unknown backbone '{self.backbone}'")
        for name in ("patch_input_size", "encoder_image_size", "token_size"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1")
        if self.patch_input_size % self.token_size:
            raise ValidationError(
                f"patch_input_size {self.patch_input_size} is not divisible by "
                f"token size {self.token_size}"
            )
        if self.encoder_image_size % self.token_size:
            raise ValidationError(
                f"encoder_image_size {self.encoder_image_size} is not divisible by "
                f"token size {self.token_size}"
            )
        if self.encoder_embed_dim % self.encoder_heads:
            raise ValidationError("encoder_embed_dim must be divisible by encoder_heads")
        if self.decoder_dim % self.decoder_heads or self.decoder_dim % 8:
            raise ValidationError(
                "decoder_dim must be divisible by decoder_heads and by 8"
            )
        if len(self.pixel_mean) != self.in_chans or len(self.pixel_std) != self.in_chans:
            raise ValidationError("pixel_mean/pixel_std need one value per input channel")
        if any(index >= self.encoder_depth for index in self.global_attn_indexes):
            raise ValidationError("global_attn_indexes must refer to existing blocks")
        return self


@dataclass(frozen=True)
class TrainConfig:
    """Optimisation settings of the decoder fine-tuning"""

    learning_rate: float = 1e-5
    batch_size: int = 8
    max_epochs: int = 50
    split_ratio: float = 0.8
    seed: int = 0
    scheduler_factor: float = 0.5
    scheduler_patience: int = 3
    early_stop_patience: int = 10
    min_lr: float = 1e-7
    box_jitter: int = 0
    workers: int = 1

    def validate(self):
        if not 0.0 < self.split_ratio < 1.0:
            raise ValidationError("split_ratio must lie in (0, 1)")
        if not 0.0 < self.scheduler_factor < 1.0:
            raise ValidationError("scheduler_factor must lie in (0, 1)")
        if self.scheduler_patience < 1 or self.early_stop_patience < 1:
            raise ValidationError("patiences must be >= 1")
        if self.learning_rate <= 0:
            raise ValidationError("learning_rate must be > 0")
        if self.min_lr <= 0 or self.min_lr > self.learning_rate:
            raise ValidationError("min_lr must lie in (0, learning_rate]")
        if self.batch_size < 1 or self.max_epochs < 1 or self.workers < 1:
            raise ValidationError("batch_size, max_epochs and workers must be >= 1")
        if self.box_jitter < 0:
            raise ValidationError("box_jitter must be >= 0")
        return self


@dataclass(frozen=True)
class TilingConfig:
    """Tiled inference geometry"""

    patch_size: int = 256
    stride: int = 128
    window: str = BlendWindow.HANN_SQUARED
    threshold: float = 0.5
    batch_size: int = 8

    def validate(self):
        if self.patch_size < 1 or not 1 <= self.stride <= self.patch_size:
            raise ValidationError("stride must lie in [1, patch_size]")
        if self.window not in BlendWindow.all():
            raise ValidationError(
                f"Unknown window '{self.window}', expected one of {BlendWindow.all()}"
            )
        if not 0.0 < self.threshold < 1.0:
            raise ValidationError("threshold must lie in (0, 1)")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be >= 1")
        return self


@dataclass(frozen=True)
class DataConfig:
    """Dataset location and patch selection"""

    dataset_root: str = "data"
    default_source: str = SourceTag.CT
    min_foreground_fraction: float = 0.01
    prompt_mode: str = PromptMode.PATCH
    isodata_mode: str = IsodataMode.PER_IMAGE

    def validate(self):
        if SourceTag.parse(self.default_source) is None:
            raise ValidationError(f"Unknown source tag '{self.default_source}'")
        if not 0.0 <= self.min_foreground_fraction < 0.5:
            raise ValidationError("min_foreground_fraction must lie in [0, 0.5)")
        if self.prompt_mode not in PromptMode.all():
            raise ValidationError(f"Unknown prompt mode '{self.prompt_mode}'")
        if self.isodata_mode not in IsodataMode.all():
            raise ValidationError(f"Unknown IsoData mode '{self.isodata_mode}'")
        return self


@dataclass(frozen=True)
class PipelineConfig:
    """All sections plus the run-wide seed and output directory"""

    data: DataConfig = field(default_factory=DataConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    tiling: TilingConfig = field(default_factory=TilingConfig)
    out_dir: str = "runs"
    seed: int = 0

    def __post_init__(self):
        # The run seed propagates into every seeded section
        object.__setattr__(self, "model", replace(self.model, seed=self.seed))
        object.__setattr__(self, "train", replace(self.train, seed=self.seed))

    def validate(self):
        self.data.validate()
        self.model.validate()
        self.train.validate()
        self.tiling.validate()
        return self

    def with_overrides(self, seed=None, out_dir=None, **tiling):
        """Apply command-line overrides, ignoring flags that were not given"""
        config = self
        tiling = {key: value for key, value in tiling.items() if value is not None}
        if tiling:
            config = replace(config, tiling=replace(config.tiling, **tiling))
        if seed is not None:
            config = replace(config, seed=seed)
        if out_dir is not None:
            config = replace(config, out_dir=out_dir)
        return config

    @classmethod
    def from_file(cls, path: Optional[str] = None):
        """Read an INI file; None yields the defaults"""
        if path is None:
            return cls()
        if not os.path.isfile(path):
            raise FileNotFoundError(f"Config file not found: {path}")

        parser = configparser.ConfigParser()
        parser.read(path)

        model_values = _section_values(parser, "model", ModelConfig)
        backbone = model_values.pop("backbone", Backbone.TOY)
        model = ModelConfig.from_preset(backbone, **model_values)

        pipeline_values = _section_values(parser, "pipeline", cls)
        logger.info(f"Loaded pipeline configuration from {path}")
        return cls(
            data=DataConfig(**_section_values(parser, "data", DataConfig)),
            model=model,
            train=TrainConfig(**_section_values(parser, "train", TrainConfig)),
            tiling=TilingConfig(**_section_values(parser, "tiling", TilingConfig)),
            **pipeline_values,
        )

    def to_ini(self, path):
        """Write the effective configuration, sections in a fixed order"""
        parser = configparser.ConfigParser()
        parser["pipeline"] = {"seed": str(self.seed), "out_dir": self.out_dir}
        for name in ("data", "model", "train", "tiling"):
            section = getattr(self, name)
            parser[name] = {
                key: _format_value(value)
                for key, value in dataclasses.asdict(section).items()
            }
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", encoding="utf-8") as handle:
            parser.write(handle)
        return path


def _section_values(parser, section, config_type):
    """Coerce the raw strings of one section to the dataclass field types"""
    if not parser.has_section(section):
        return {}
    known = {item.name: item for item in fields(config_type)}
    values = {}
    for key, raw in parser.items(section):
        if key not in known:
            raise ValidationError(f"Unknown key '{key}' in section [{section}]")
        values[key] = _coerce(raw, known[key])
    return values


def _coerce(raw, config_field):
    kind = config_field.type
    text = raw.strip()
    try:
        if kind in (int, "int"):
            return int(text)
        if kind in (float, "float"):
            return float(text)
        if "Tuple[int" in str(kind):
            return tuple(int(part) for part in text.split(",") if part.strip())
        if "Tuple[float" in str(kind):
            return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise ValidationError(f"Invalid value '{raw}' for {config_field.name}: {e}")
    return text


def _format_value(value):
    if isinstance(value, tuple):
        return ",".join(str(item) for item in value)
    return str(value)
