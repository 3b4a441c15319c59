import logging
import warnings

import click

from config import AppConfig
from commands import evaluate, fetch_weights, infer, plot_history, prepare, train

# Suppress the torch deterministic-algorithm notices that clutter the logs
warnings.filterwarnings("ignore", message=".*deterministic.*")

# Setup application logging configuration
logging.basicConfig(
    level=getattr(logging, AppConfig.LOG_LEVEL, logging.INFO),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
# Get the logger instance for the main module
logger = logging.getLogger(__name__)


def create_cli():
    """Create and configure the command group"""

    @click.group(context_settings={"help_option_names": ["-h", "--help"]})
    def cli():
        """Box-prompted segmentation of large grayscale rock images"""

    # Register the commands for the different pipeline stages
    cli.add_command(prepare)
    cli.add_command(train)
    cli.add_command(infer)
    cli.add_command(evaluate)
    cli.add_command(plot_history)
    cli.add_command(fetch_weights)

    return cli


if __name__ == "__main__":  # pragma: no cover
    create_cli()()
