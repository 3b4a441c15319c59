"""
Provenance manifests written next to command outputs
"""

import hashlib
import json
import os
import uuid
from datetime import datetime


def build_manifest(data=None, meta=None):
    """
    Wrap a payload with run metadata

    Args:
        data: Deterministic payload (counts, thresholds, paths)
        meta: Optional metadata dict

    Returns:
        Manifest dict with "data" and "meta" keys
    """
    if meta is None:
        meta = {}

    # Run-varying fields stay in meta so data can be compared across reruns
    meta.update(
        {"timestamp": datetime.now().isoformat(), "run_id": str(uuid.uuid4())}
    )

    return {"data": data if data is not None else {}, "meta": meta}


def write_manifest(path, data=None, meta=None):
    """
    Write a manifest as sorted-key JSON

    Args:
        path: Output file path
        data: Deterministic payload
        meta: Optional metadata dict

    Returns:
        The manifest dict that was written
    """
    manifest = build_manifest(data, meta)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
    return manifest


def read_manifest(path):
    """Read a manifest written by write_manifest"""
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def sha256_hash(data):
    """
    Calculate SHA256 hash of bytes or a string

    Args:
        data: Bytes or string to hash

    Returns:
        Hex digest
    """
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def file_digest(path, algorithm="sha256", chunk_size=1 << 20):
    """Hex digest of a file with any hashlib algorithm, read in chunks"""
    digest = hashlib.new(algorithm)
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(chunk_size), b""):
            digest.update(chunk)
    return digest.hexdigest()


def sha256_file(path, chunk_size=1 << 20):
    """SHA256 of a file, read in chunks"""
    return file_digest(path, "sha256", chunk_size)


def md5_file(path, chunk_size=1 << 20):
    """MD5 of a file; published checkpoint names carry its leading digits"""
    return file_digest(path, "md5", chunk_size)
