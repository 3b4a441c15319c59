"""
Application settings read from the environment
"""

import os
import logging
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)


class AppConfig:
    """Process-wide runtime settings"""

    LOG_LEVEL = os.getenv("ROCKSEG_LOG_LEVEL", "INFO").upper()
    DEVICE = os.getenv("ROCKSEG_DEVICE", "cpu")
    # Single-threaded kernels keep single-worker runs bit-reproducible
    NUM_THREADS = int(os.getenv("ROCKSEG_NUM_THREADS", 1))
    MASTER_ADDR = os.getenv("ROCKSEG_MASTER_ADDR", "127.0.0.1")
    MASTER_PORT = os.getenv("ROCKSEG_MASTER_PORT", "29517")


class WeightsConfig:
    """Pretrained base checkpoint location"""

    WEIGHTS_DIR = os.path.expanduser(
        os.getenv("ROCKSEG_WEIGHTS_DIR", os.path.join("~", ".cache", "rockseg"))
    )
    BASE_URL = os.getenv(
        "ROCKSEG_WEIGHTS_URL",
        "https://dl.fbaipublicfiles.com/segment_anything/sam_vit_b_01ec64.pth",
    )
    BASE_FILENAME = os.getenv("ROCKSEG_WEIGHTS_FILENAME", "sam_vit_b_01ec64.pth")
    TIMEOUT = int(os.getenv("ROCKSEG_WEIGHTS_TIMEOUT", 30))
    # Set to 0 to accept a checkpoint whose digest differs from its file name
    VERIFY = os.getenv("ROCKSEG_WEIGHTS_VERIFY", "1") not in ("0", "false", "False")

    @classmethod
    def base_path(cls):
        """Path where the base checkpoint is expected"""
        return os.path.join(cls.WEIGHTS_DIR, cls.BASE_FILENAME)

    @classmethod
    def validate(cls):
        """Validate required settings"""
        if not cls.WEIGHTS_DIR:
            raise ValueError("ROCKSEG_WEIGHTS_DIR environment variable is required")
        if not cls.BASE_URL:
            raise ValueError("ROCKSEG_WEIGHTS_URL environment variable is required")
        if not cls.BASE_FILENAME:
            raise ValueError(
                "ROCKSEG_WEIGHTS_FILENAME environment variable is required"
            )

        logger.info("Weights configuration loaded from environment")
        logger.info(f"   Weights dir: {cls.WEIGHTS_DIR}")
        logger.info(f"   Source: {cls.BASE_URL}")
