"""Training history records."""

from __future__ import annotations

import json
import math
from pathlib import Path

from ..errors import TrainingDivergedError


class History:
    """Append-only list of per-epoch records, serializable as JSONL."""

    def __init__(self):
        self.rows = []

    def log(self, epoch, split, **terms):
        row = {"epoch": epoch, "split": split}
        row.update({k: float(v) for k, v in terms.items()})
        self.rows.append(row)
        return row

    def check_finite(self, row):
        bad = {k: v for k, v in row.items()
               if isinstance(v, float) and not math.isfinite(v)}
        if bad:
            raise TrainingDivergedError(
                f"non-finite loss terms at epoch {row['epoch']}: {sorted(bad)}",
                record=row)

    def last(self, split="train"):
        for row in reversed(self.rows):
            if row["split"] == split:
                return row
        return None

    def save(self, path):
        Path(path).write_text(
            "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.rows))

    @classmethod
    def load(cls, path):
        h = cls()
        for line in Path(path).read_text().splitlines():
            h.rows.append(json.loads(line))
        return h
