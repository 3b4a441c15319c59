"""
Pretrained Weights Client
Downloads the published base checkpoint and verifies it
"""

# Import os for paths and the atomic rename
import os

# Import re to read the hash prefix out of the file name
import re

# Import logging for application logging
import logging

# Import requests for the streamed HTTP download
import requests

# Import tqdm for the download progress bar
from tqdm import tqdm

# Import WeightsConfig for configuration settings
from config import WeightsConfig

# Import the error types mapped to exit codes
from utils.errors import ChecksumError, MissingWeightsError

# Import the streaming MD5 helper
from utils.manifest import md5_file

# Get logger instance
logger = logging.getLogger(__name__)

# Published checkpoints carry the leading hex digits of their MD5 before the suffix
_HASH_PREFIX = re.compile(r"_([0-9a-f]{6,64})\.[A-Za-z0-9]+$")

CHUNK_SIZE = 1 << 20


class WeightsClient:
    """Fetches the pretrained base checkpoint into the weights directory"""

    def __init__(self, config=WeightsConfig):
        # Initialize with configuration
        self.config = config

    @staticmethod
    def expected_prefix(filename):
        """MD5 prefix encoded in a checkpoint file name, or None"""
        match = _HASH_PREFIX.search(filename)
        return match.group(1) if match else None

    def verify(self, path, filename=None):
        """
        Check a downloaded file against the hash prefix in its name

        Raises:
            ChecksumError: digest does not start with the encoded prefix
        """
        prefix = self.expected_prefix(filename or os.path.basename(path))
        if prefix is None or not self.config.VERIFY:
            logger.warning(f"No checksum verification for {path}")
            return path
        digest = md5_file(path)
        if not digest.startswith(prefix):
            raise ChecksumError(
                f"Checksum mismatch for {path}",
                details={"expected_prefix": prefix, "md5": digest},
            )
        logger.info(f"Checksum verified: {digest[:12]}...")
        return path

    def fetch(self, force=False):
        """
        Download the base checkpoint unless it is already present

        Args:
            force: Download again even if the file exists

        Returns:
            Local path of the checkpoint

        Raises:
            MissingWeightsError: download failed
            ChecksumError: downloaded file fails verification
        """
        self.config.validate()
        target = self.config.base_path()
        if os.path.isfile(target) and not force:
            logger.info(f"Weights already present at {target}")
            return self.verify(target)

        os.makedirs(os.path.dirname(target), exist_ok=True)
        partial = target + ".part"
        logger.info(f"Downloading {self.config.BASE_URL}")

        try:
            # Stream the body so large checkpoints never sit in memory
            with requests.get(
                self.config.BASE_URL, stream=True, timeout=self.config.TIMEOUT
            ) as response:
                response.raise_for_status()
                total = int(response.headers.get("content-length", 0)) or None
                with open(partial, "wb") as handle, tqdm(
                    total=total, unit="B", unit_scale=True, desc=self.config.BASE_FILENAME
                ) as progress:
                    for chunk in response.iter_content(chunk_size=CHUNK_SIZE):
                        handle.write(chunk)
                        progress.update(len(chunk))

        except requests.exceptions.Timeout:
            # Handle request timeout
            logger.error(f"Download timeout for: {self.config.BASE_URL}")
            self._discard(partial)
            raise MissingWeightsError("Weights download timed out")
        except requests.exceptions.RequestException as e:
            # Handle network errors
            logger.error(f"Network error: {str(e)}")
            self._discard(partial)
            raise MissingWeightsError(f"Weights download failed: {str(e)}")

        try:
            self.verify(partial, self.config.BASE_FILENAME)
        except ChecksumError:
            self._discard(partial)
            raise
        os.replace(partial, target)
        logger.info(f"Weights saved to {target}")
        return target

    @staticmethod
    def _discard(path):
        if os.path.exists(path):
            os.remove(path)
