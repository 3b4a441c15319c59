"""
Seeding and threading setup for reproducible runs
"""

import logging
import random

import numpy as np
import torch

from config import AppConfig

logger = logging.getLogger(__name__)


def seed_everything(seed, num_threads=None):
    """Seed python, numpy and torch and pin the CPU thread count"""
    random.seed(seed)
    np.random.seed(seed % (2**32))
    torch.manual_seed(seed)
    torch.set_num_threads(num_threads or AppConfig.NUM_THREADS)
    torch.use_deterministic_algorithms(True, warn_only=True)
    logger.debug(f"Seeded run with {seed}")
    return seed
