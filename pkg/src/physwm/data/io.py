"""Dataset directory format: manifest.jsonl plus per-step PNGs.

Layout (documented in FORMAT.md at the repository root):
  manifest.jsonl     line 1: header; line k+1: episode k record
  ep{k}/step{t}.png  8-bit RGB frame
  ep{k}/mask{i}_{t}.png  1-bit segment mask, i in 0..2

Floats in the manifest are written with Python's shortest round-trip repr,
so states and actions survive save/load bit-exactly.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import DatasetCorruptError, DatasetVersionError
from .types import Dataset, Episode, EpisodeLabels

FORMAT_VERSION = 1
KIND = "physwm-dataset"


def _labels_record(labels):
    if labels is None:
        return None
    rec = {"level": labels.level, "dims": list(labels.supervised_dims)}
    rec["values"] = None if labels.values is None else labels.values.tolist()
    if labels.interval_bounds:
        rec["interval_bounds"] = [[int(d), float(a), float(b)]
                                  for d, (a, b) in sorted(labels.interval_bounds.items())]
    return rec


def _labels_from_record(rec):
    if rec is None:
        return None
    bounds = None
    if rec.get("interval_bounds"):
        bounds = {d: (a, b) for d, a, b in rec["interval_bounds"]}
    values = None if rec["values"] is None else np.array(rec["values"], dtype=np.float64)
    return EpisodeLabels(rec["level"], tuple(rec["dims"]), values, bounds)


def save(dataset, path):
    """Write the dataset directory; returns the path."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    header = {
        "kind": KIND,
        "format_version": FORMAT_VERSION,
        "env_id": dataset.env_id,
        "policy": dataset.policy,
        "seed": dataset.seed,
        "dt": dataset.dt,
        "resolution": dataset.resolution,
        "n_episodes": len(dataset.episodes),
    }
    lines = [json.dumps(header, sort_keys=True)]
    for k, ep in enumerate(dataset.episodes):
        rec = {
            "episode": k,
            "seed": ep.seed,
            "dt": ep.dt,
            "n_steps": len(ep),
            "states": ep.states.tolist(),
            "actions": ep.actions.tolist(),
            "labels": _labels_record(ep.labels),
        }
        lines.append(json.dumps(rec, sort_keys=True))
        ep_dir = path / f"ep{k}"
        ep_dir.mkdir(exist_ok=True)
        for t in range(len(ep)):
            Image.fromarray(ep.pixels[t]).save(ep_dir / f"step{t}.png")
            for i in range(3):
                mask_img = Image.fromarray(ep.masks[t, i].astype(np.uint8) * 255,
                                           mode="L").convert("1", dither=Image.NONE)
                mask_img.save(ep_dir / f"mask{i}_{t}.png")
    (path / "manifest.jsonl").write_text("\n".join(lines) + "\n")
    return path


def load(path):
    path = Path(path)
    manifest = path / "manifest.jsonl"
    if not manifest.is_file():
        raise DatasetCorruptError(f"no manifest.jsonl under {path}")
    lines = manifest.read_text().splitlines()
    if not lines:
        raise DatasetCorruptError("empty manifest")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as e:
        raise DatasetCorruptError(f"bad manifest header: {e}") from e
    if header.get("kind") != KIND:
        raise DatasetCorruptError(f"not a {KIND} directory: {path}")
    version = header.get("format_version")
    if version != FORMAT_VERSION:
        raise DatasetVersionError(version, (FORMAT_VERSION,))
    n_episodes = header["n_episodes"]
    if len(lines) - 1 != n_episodes:
        raise DatasetCorruptError(
            f"manifest lists {n_episodes} episodes but has {len(lines) - 1} records")
    episodes = []
    for k in range(n_episodes):
        try:
            rec = json.loads(lines[k + 1])
        except json.JSONDecodeError as e:
            raise DatasetCorruptError(f"bad record for episode {k}: {e}") from e
        t_len = rec["n_steps"]
        ep_dir = path / f"ep{k}"
        pixels, masks = [], []
        for t in range(t_len):
            frame_path = ep_dir / f"step{t}.png"
            if not frame_path.is_file():
                raise DatasetCorruptError(f"missing {frame_path}")
            pixels.append(np.asarray(Image.open(frame_path)))
            step_masks = []
            for i in range(3):
                mask_path = ep_dir / f"mask{i}_{t}.png"
                if not mask_path.is_file():
                    raise DatasetCorruptError(f"missing {mask_path}")
                step_masks.append(np.asarray(Image.open(mask_path), dtype=bool))
            masks.append(np.stack(step_masks))
        episodes.append(Episode(
            env_id=header["env_id"], seed=rec["seed"], dt=rec["dt"],
            states=np.array(rec["states"], dtype=np.float64),
            actions=np.array(rec["actions"], dtype=np.float64),
            pixels=np.array(pixels), masks=np.array(masks),
            labels=_labels_from_record(rec["labels"])))
    return Dataset(env_id=header["env_id"], policy=header["policy"],
                   seed=header["seed"], dt=header["dt"],
                   resolution=header["resolution"], episodes=episodes)


def dataset_hash(path):
    """sha256 over the manifest and every PNG, in sorted-path order."""
    path = Path(path)
    h = hashlib.sha256()
    files = sorted(p for p in path.rglob("*") if p.is_file())
    for p in files:
        h.update(str(p.relative_to(path)).encode())
        h.update(p.read_bytes())
    return h.hexdigest()


def datasets_equal(a, b):
    """Bit-exact comparison, labels included."""
    if (a.env_id, a.policy, a.seed, a.dt, a.resolution) != \
            (b.env_id, b.policy, b.seed, b.dt, b.resolution):
        return False
    if len(a.episodes) != len(b.episodes):
        return False
    for ea, eb in zip(a.episodes, b.episodes):
        if (ea.seed, ea.dt) != (eb.seed, eb.dt):
            return False
        for fa, fb in ((ea.states, eb.states), (ea.actions, eb.actions),
                       (ea.pixels, eb.pixels), (ea.masks, eb.masks)):
            if not np.array_equal(fa, fb):
                return False
        la, lb = ea.labels, eb.labels
        if (la is None) != (lb is None):
            return False
        if la is not None:
            if (la.level, tuple(la.supervised_dims)) != (lb.level, tuple(lb.supervised_dims)):
                return False
            if (la.values is None) != (lb.values is None):
                return False
            if la.values is not None and not np.array_equal(la.values, lb.values):
                return False
            if (la.interval_bounds or None) != (lb.interval_bounds or None):
                return False
    return True
