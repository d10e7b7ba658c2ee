"""Checkpoints: npz weight container plus a JSON sidecar of metadata.

The npz maps parameter names to arrays; the sidecar records the format
version, model kind, construction arguments, and the generating config hash,
so a checkpoint can be rebuilt without the original script.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import DatasetVersionError, ShapeError

CHECKPOINT_VERSION = 1


def save_checkpoint(path, model, kind, build_args, config_hash=""):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    params = model.parameters()
    names = [p.name for p in params]
    if len(set(names)) != len(names):
        raise ShapeError(f"duplicate parameter names in {kind} model")
    np.savez(path, **{p.name: p.value for p in params})
    meta = {
        "format_version": CHECKPOINT_VERSION,
        "kind": kind,
        "build_args": build_args,
        "config_hash": config_hash,
        "param_names": names,
    }
    path.with_suffix(".json").write_text(json.dumps(meta, indent=1, sort_keys=True))


def load_weights(path, model):
    """Load saved arrays into an already-built model, strictly by name."""
    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    if meta["format_version"] != CHECKPOINT_VERSION:
        raise DatasetVersionError(meta["format_version"], (CHECKPOINT_VERSION,))
    with np.load(path) as data:
        saved = set(data.files)
        params = {p.name: p for p in model.parameters()}
        if saved != set(params):
            missing = sorted(set(params) - saved)
            extra = sorted(saved - set(params))
            raise ShapeError(f"checkpoint mismatch: missing {missing}, extra {extra}")
        for name, p in params.items():
            arr = data[name]
            if arr.shape != p.value.shape:
                raise ShapeError(
                    f"{name}: shape {arr.shape} != model {p.value.shape}")
            p.value[...] = arr.astype(p.value.dtype)
    return meta
