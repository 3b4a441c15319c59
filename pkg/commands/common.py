"""
Options and bookkeeping shared by the pipeline commands
"""

import logging
import os

import click

from config import PipelineConfig
from utils.manifest import write_manifest
from utils.seeding import seed_everything

logger = logging.getLogger(__name__)

EFFECTIVE_CONFIG = "effective_config.ini"
RUN_MANIFEST = "manifest.json"


_PIPELINE_OPTIONS = [
    click.option(
        "--config",
        "config_path",
        type=click.Path(dir_okay=False),
        default=None,
        help="Pipeline configuration file (INI)",
    ),
    click.option("--seed", type=int, default=None, help="Run seed, overrides the config file"),
    click.option(
        "--out",
        "out_dir",
        type=click.Path(file_okay=False),
        default=None,
        help="Output directory, overrides the config file",
    ),
]


def pipeline_options(f):
    """--config, --seed and --out, common to every pipeline command"""
    for option in reversed(_PIPELINE_OPTIONS):
        f = option(f)
    return f


def load_pipeline(config_path, seed=None, out_dir=None, **tiling):
    """Read the config file, apply flag overrides, validate and seed the run"""
    pipeline = PipelineConfig.from_file(config_path).with_overrides(
        seed=seed, out_dir=out_dir, **tiling
    )
    pipeline.validate()
    seed_everything(pipeline.seed)
    return pipeline


def log_banner(command, pipeline):
    logger.info("=" * 60)
    logger.info(f"rockseg {command}")
    logger.info(f"Backbone: {pipeline.model.backbone}, seed: {pipeline.seed}")
    logger.info(f"Output: {pipeline.out_dir}")
    logger.info("=" * 60)


def finish_run(pipeline, command, data=None):
    """
    Echo the effective configuration into the output directory and, when data
    is given, write the run manifest next to it

    The manifest meta holds a fresh run_id and timestamp, so reruns differ in
    manifest.json only; the CSV and image outputs are byte-identical.
    """
    os.makedirs(pipeline.out_dir, exist_ok=True)
    pipeline.to_ini(os.path.join(pipeline.out_dir, EFFECTIVE_CONFIG))
    if data is not None:
        write_manifest(
            os.path.join(pipeline.out_dir, RUN_MANIFEST), data, meta={"command": command}
        )
