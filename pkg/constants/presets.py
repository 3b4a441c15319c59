"""
Constants and Presets for rock image segmentation
"""


class Backbone:
    """Image encoder backbones"""

    PRETRAINED_BASE = "pretrained-base"
    TOY = "toy"

    @classmethod
    def all(cls):
        """Return all available backbones"""
        return [cls.PRETRAINED_BASE, cls.TOY]


class BlendWindow:
    """Blend windows used when stitching patch outputs"""

    UNIT = "unit"
    HANN_SQUARED = "hann_squared"

    @classmethod
    def all(cls):
        """Return all available blend windows"""
        return [cls.UNIT, cls.HANN_SQUARED]


class SourceTag:
    """Imaging modality of a sample"""

    CT = "CT"
    SEM = "SEM"

    @classmethod
    def all(cls):
        """Return all available source tags"""
        return [cls.CT, cls.SEM]

    @classmethod
    def parse(cls, value):
        """Match a tag case-insensitively, None when it is not a known tag"""
        for tag in cls.all():
            if str(value).upper() == tag:
                return tag
        return None


class RunMode:
    """Epoch modes"""

    TRAIN = "train"
    VALIDATE = "validate"

    @classmethod
    def all(cls):
        return [cls.TRAIN, cls.VALIDATE]


class IsodataMode:
    """Whether IsoData levels are computed per image or over the whole set"""

    PER_IMAGE = "per-image"
    GLOBAL = "global"

    @classmethod
    def all(cls):
        return [cls.PER_IMAGE, cls.GLOBAL]


class PromptMode:
    """How many box prompts a training patch yields"""

    PATCH = "patch"
    COMPONENT = "component"

    @classmethod
    def all(cls):
        return [cls.PATCH, cls.COMPONENT]


class Aggregation:
    """Metric aggregation over an image set"""

    PER_IMAGE = "per-image"
    POOLED = "pooled"

    @classmethod
    def all(cls):
        return [cls.PER_IMAGE, cls.POOLED]


class OutputFormat:
    """Probability map output formats"""

    PNG = "png"
    CSV = "csv"
    BOTH = "both"

    @classmethod
    def all(cls):
        return [cls.PNG, cls.CSV, cls.BOTH]


class ExitCode:
    """Process exit codes"""

    SUCCESS = 0
    UNEXPECTED = 1
    LAYOUT = 3
    VALIDATION = 4
    INCOMPATIBLE = 5
    DIVERGENCE = 6
    PARTIAL_FAILURE = 7
    IO = 8
    MISSING_WEIGHTS = 9


# Architecture presets per backbone
BACKBONE_PRESETS = {
    Backbone.TOY: {
        "encoder_image_size": 256,
        "token_size": 16,
        "in_chans": 1,
        "encoder_embed_dim": 32,
        "encoder_depth": 4,
        "encoder_heads": 4,
        "window_size": 0,
        "global_attn_indexes": (),
        "decoder_dim": 32,
        "decoder_depth": 2,
        "decoder_heads": 4,
        "decoder_mlp_dim": 64,
        "pixel_mean": (0.5,),
        "pixel_std": (0.5,),
    },
    Backbone.PRETRAINED_BASE: {
        "encoder_image_size": 1024,
        "token_size": 16,
        "in_chans": 3,
        "encoder_embed_dim": 768,
        "encoder_depth": 12,
        "encoder_heads": 12,
        "window_size": 14,
        "global_attn_indexes": (2, 5, 8, 11),
        "decoder_dim": 256,
        "decoder_depth": 2,
        "decoder_heads": 8,
        "decoder_mlp_dim": 2048,
        "pixel_mean": (0.485, 0.456, 0.406),
        "pixel_std": (0.229, 0.224, 0.225),
    },
}

# Trainable parameter count reported for the fine-tuned base model
REFERENCE_TRAINABLE_PARAMETERS = 6.32e6

# File name of the name-translation manifest shipped next to the model code
NAME_MAP_FILENAME = "name_map.txt"

# Image file suffixes accepted as inputs
IMAGE_SUFFIXES = (".png", ".tif", ".tiff")
