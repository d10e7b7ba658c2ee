"""Interval bound propagation through the part decoders.

Bounds run exactly through affine stages (positive/negative weight split)
and monotone elementwise stages. Arithmetic is float64 and final bounds are
widened outward by a small guard so the float32 forward pass can never
escape through rounding alone.
"""

from __future__ import annotations

import copy
import time
from dataclasses import dataclass, replace

import numpy as np

from ..errors import ShapeError, UnsupportedStageError
from ..models.params import count_params
from ..nn.layers import (
    Conv2d,
    ConvTranspose2d,
    Flatten,
    Linear,
    ReLU,
    Reshape,
    Sequential,
    Sigmoid,
)

FLOAT_GUARD = 1e-6


@dataclass(frozen=True)
class BoundBox:
    """Input box (decoder's normalized input space) and per-pixel output bounds."""

    input_lo: np.ndarray
    input_hi: np.ndarray
    output_lo: np.ndarray | None = None
    output_hi: np.ndarray | None = None

    def __post_init__(self):
        lo = np.asarray(self.input_lo, dtype=np.float64)
        hi = np.asarray(self.input_hi, dtype=np.float64)
        if lo.shape != hi.shape:
            raise ShapeError(f"box shapes differ: {lo.shape} vs {hi.shape}")
        if np.any(lo > hi):
            raise ShapeError("box requires lo <= hi in every dim")
        object.__setattr__(self, "input_lo", lo)
        object.__setattr__(self, "input_hi", hi)
        if (self.output_lo is None) != (self.output_hi is None):
            raise ShapeError("output bounds must come as a pair")
        if self.output_lo is not None and np.any(
                np.asarray(self.output_lo) > np.asarray(self.output_hi)):
            raise ShapeError("output bounds require lo <= hi")

    def widths(self):
        if self.output_lo is None:
            raise ShapeError("propagate before asking for widths")
        return self.output_hi - self.output_lo


def stages_of(decoder):
    """The decoder's layer list; accepts Sequential or wrappers exposing one."""
    if isinstance(decoder, Sequential):
        return decoder.layers
    for attr in ("net", "decoder"):
        inner = getattr(decoder, attr, None)
        if isinstance(inner, Sequential):
            return inner.layers
    raise UnsupportedStageError(f"cannot enumerate stages of {type(decoder).__name__}")


def _affine_copies(layer):
    pos = copy.deepcopy(layer)
    neg = copy.deepcopy(layer)
    for p_pos, p_neg in zip(pos.parameters(), neg.parameters()):
        if p_pos.name.endswith(".b"):
            p_neg.value = np.zeros_like(p_neg.value)
        else:
            p_pos.value = np.maximum(p_pos.value, 0.0)
            p_neg.value = np.minimum(p_neg.value, 0.0)
        p_pos.value = p_pos.value.astype(np.float64)
        p_neg.value = p_neg.value.astype(np.float64)
    return pos, neg


def _stage_bounds(layer, lo, hi):
    if isinstance(layer, (Linear, Conv2d, ConvTranspose2d)):
        pos, neg = _affine_copies(layer)
        new_lo = pos.forward(lo)[0] + neg.forward(hi)[0]
        new_hi = pos.forward(hi)[0] + neg.forward(lo)[0]
        return new_lo, new_hi
    if isinstance(layer, ReLU):
        return np.maximum(lo, 0.0), np.maximum(hi, 0.0)
    if isinstance(layer, Sigmoid):
        return 1.0 / (1.0 + np.exp(-lo)), 1.0 / (1.0 + np.exp(-hi))
    if isinstance(layer, (Reshape, Flatten)):
        return layer.forward(lo)[0], layer.forward(hi)[0]
    raise UnsupportedStageError(f"no interval rule for {type(layer).__name__}")


def interval_bound_propagate(decoder, box, guard=FLOAT_GUARD):
    """Fill ``box`` with sound per-pixel output bounds for the boxed input."""
    lo = box.input_lo[None].astype(np.float64)
    hi = box.input_hi[None].astype(np.float64)
    for layer in stages_of(decoder):
        lo, hi = _stage_bounds(layer, lo, hi)
        if np.any(lo > hi):
            raise ShapeError("interval inversion; propagation bug")
    return replace(box, output_lo=lo[0] - guard, output_hi=hi[0] + guard)


def mc_containment(decoder, box, n_samples=10_000, rng=None, dtype=np.float32):
    """Count sampled decoder outputs escaping the propagated bounds (want 0)."""
    if box.output_lo is None:
        box = interval_bound_propagate(decoder, box)
    rng = rng or np.random.default_rng(0)
    d = box.input_lo.shape[0]
    violations = 0
    batch = 500
    done = 0
    while done < n_samples:
        n = min(batch, n_samples - done)
        z = rng.uniform(box.input_lo, box.input_hi, size=(n, d)).astype(dtype)
        y, _ = decoder.forward(z)
        y = y.reshape(n, *box.output_lo.shape)
        bad = (y < box.output_lo[None]) | (y > box.output_hi[None])
        violations += int(bad.any(axis=tuple(range(1, y.ndim))).sum())
        done += n
    return violations


def verification_scaling_report(part_decoders, monolithic, boxes):
    """Cost/precision table: each part decoder vs one monolithic decoder.

    ``part_decoders``: dict name -> decoder; ``monolithic``: decoder whose
    input dim matches the boxes (None drops the comparison row). Returns row
    dicts with parameter counts, total propagation wall time over the boxes,
    and mean output width.
    """
    entries = list(part_decoders.items())
    if monolithic is not None:
        entries.append(("monolithic", monolithic))
    rows = []
    for name, dec in entries:
        t0 = time.perf_counter()
        widths = []
        for box in boxes:
            out = interval_bound_propagate(dec, box)
            widths.append(float(out.widths().mean()))
        rows.append({
            "decoder": name,
            "params": count_params(dec),
            "propagate_seconds": time.perf_counter() - t0,
            "mean_output_width": float(np.mean(widths)) if widths else float("nan"),
            "n_boxes": len(boxes),
        })
    part_total = sum(r["propagate_seconds"] for r in rows if r["decoder"] != "monolithic")
    for r in rows:
        r["part_time_total"] = part_total
    return rows
