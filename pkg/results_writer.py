"""
Handle CSV and JSON output of distributions, sweeps and search results.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence

import numpy as np
import pandas as pd
from filelock import FileLock

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.9g"


def _lock_for(path: Path) -> FileLock:
    return FileLock(path.with_suffix(f"{path.suffix}.lock"))


class ResultsWriter:
    """Writes tables under a lock file next to the target and reads them back against a schema."""

    def __init__(self, output_dir: Path):
        self.output_dir = Path(output_dir)

    def path_for(self, name: str) -> Path:
        return self.output_dir / name

    def write_table(self, name: str, columns: Mapping[str, Iterable[Any]]) -> Path:
        """Write ``columns`` (ordered name -> values) as a one-header CSV with 9 significant digits."""
        path = self.path_for(name)
        frame = pd.DataFrame({key: np.asarray(list(values)) for key, values in columns.items()})
        path.parent.mkdir(parents=True, exist_ok=True)
        with _lock_for(path):
            try:
                frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
            except OSError as e:
                logger.error("Failed to write results table %s: %s", path, e)
                raise
        logger.info("Wrote %d rows to %s", len(frame), path)
        return path

    def write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        path = self.path_for(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        with _lock_for(path):
            try:
                with path.open("w", encoding="utf-8") as f:
                    json.dump(payload, f, indent=2, sort_keys=True, default=float)
            except OSError as e:
                logger.error("Failed to write JSON %s: %s", path, e)
                raise
        logger.info("Wrote JSON record to %s", path)
        return path

    def read_table(self, name: str, required_columns: Sequence[str]) -> pd.DataFrame:
        """Read a CSV back and check that the documented columns are present and numeric."""
        path = self.path_for(name)
        with _lock_for(path):
            frame = pd.read_csv(path)
        missing: List[str] = [column for column in required_columns if column not in frame.columns]
        if missing:
            raise ValueError(f"{path} is missing columns {missing}")
        for column in required_columns:
            if not pd.api.types.is_numeric_dtype(frame[column]):
                raise ValueError(f"Column '{column}' of {path} is not numeric")
        return frame
