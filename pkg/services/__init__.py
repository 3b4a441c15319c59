"""Services module"""

from .weights_client import WeightsClient

__all__ = ["WeightsClient"]
