"""Per-run manifest written as key=value text with atomic persistence."""

from __future__ import annotations

import logging
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Mapping


class RunManifest:
    """Collect the parameters of one run and persist them so the run can be repeated."""

    def __init__(self, manifest_file: Path) -> None:
        self.manifest_file = manifest_file
        self._logger = logging.getLogger(__name__)
        self._entries: Dict[str, str] = {}

    @property
    def entries(self) -> Dict[str, str]:
        return dict(self._entries)

    def record(self, key: str, value: Any) -> None:
        if "=" in key or "\n" in key:
            raise ValueError(f"Manifest key '{key}' may not contain '=' or newlines")
        self._entries[key] = " ".join(str(value).split())

    def record_section(self, prefix: str, values: Mapping[str, Any]) -> None:
        for key, value in values.items():
            if value is not None:
                self.record(f"{prefix}.{key}", value)

    def write(self, stamp: bool = False) -> Path:
        """Persist sorted key=value lines using an atomic file replace.

        The timestamp is opt-in so that identical runs give identical manifests.
        """
        if stamp:
            self.record("created_utc", datetime.now(timezone.utc).isoformat())
        self.manifest_file.parent.mkdir(parents=True, exist_ok=True)
        lines = "".join(f"{key}={self._entries[key]}\n" for key in sorted(self._entries))
        try:
            with tempfile.NamedTemporaryFile(
                "w", encoding="utf-8", dir=str(self.manifest_file.parent), delete=False
            ) as tmp_file:
                tmp_file.write(lines)
                tmp_file.flush()
                os.fsync(tmp_file.fileno())
                temp_path = Path(tmp_file.name)
        except OSError as exc:
            self._logger.error("Failed to write manifest %s: %s", self.manifest_file, exc)
            raise

        try:
            temp_path.replace(self.manifest_file)
        except OSError as exc:
            self._logger.error("Failed to replace manifest %s: %s", self.manifest_file, exc)
            try:
                temp_path.unlink(missing_ok=True)
            except OSError:
                pass
            raise
        self._logger.info("Wrote manifest with %d entries to %s", len(self._entries), self.manifest_file)
        return self.manifest_file

    @staticmethod
    def read(manifest_file: Path) -> Dict[str, str]:
        entries: Dict[str, str] = {}
        with manifest_file.open("r", encoding="utf-8") as file:
            for line in file:
                line = line.rstrip("\n")
                if not line:
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise ValueError(f"Malformed manifest line: {line!r}")
                entries[key] = value
        return entries
