"""Run manifests: config hash, seeds, artifact digests and stage timings."""

import hashlib
import json
import logging
import os
import time
from contextlib import contextmanager
from typing import Dict, Optional

from .schemas import ArtifactEntry, RunManifest

MANIFEST_NAME = "manifest.json"


def config_hash(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def file_digest(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


class ManifestRecorder:
    """Collects what one command writes and how long each stage takes"""

    def __init__(self, command: str, output_dir: str, payload: dict, seeds: Dict[str, int]):
        self.logger = logging.getLogger(__name__)
        self.output_dir = output_dir
        self.manifest = RunManifest(
            command=command, config_hash=config_hash(payload), seeds=dict(seeds)
        )
        self._paths: list[str] = []

    def add(self, path: str) -> str:
        if path not in self._paths:
            self._paths.append(path)
            self.logger.info(f"Wrote {path}")
        return path

    @contextmanager
    def stage(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.manifest.timings[name] = time.perf_counter() - start

    def record_time(self, name: str, seconds: float):
        self.manifest.timings[name] = seconds

    def record_size(self, name: str, value: int):
        self.manifest.model_sizes[name] = int(value)

    def write(self, name: Optional[str] = None) -> str:
        """Hash every recorded artifact and write the manifest next to them"""
        entries = []
        for path in self._paths:
            entries.append(
                ArtifactEntry(
                    path=os.path.relpath(path, self.output_dir),
                    sha256=file_digest(path),
                    bytes=os.path.getsize(path),
                )
            )
        self.manifest.artifacts = entries
        os.makedirs(self.output_dir, exist_ok=True)
        target = os.path.join(self.output_dir, name or MANIFEST_NAME)
        with open(target, "w", encoding="utf-8") as f:
            f.write(self.manifest.model_dump_json(indent=2))
            f.write("\n")
        self.logger.info(f"Manifest with {len(entries)} artifacts written to {target}")
        return target
