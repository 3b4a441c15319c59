"""
fetch-weights: download the published base checkpoint
"""

import click

from services import WeightsClient
from utils import handle_errors


@click.command("fetch-weights")
@click.option("--force", is_flag=True, help="Download again even if the file exists")
@handle_errors
def fetch_weights(force):
    """Download the pretrained base weights into ROCKSEG_WEIGHTS_DIR"""
    path = WeightsClient().fetch(force=force)
    click.echo(path)
