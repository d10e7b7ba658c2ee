"""Comparison tables for the generative-decoder study."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import MissingRunsError

# Published reference values: (average MSE, average SSIM, parameter count).
REFERENCE_TABLE = {
    ("baseline", "cartpole"): (0.02856, 0.997122, 200_259),
    ("partitioned", "cartpole"): (0.05176, 0.995614, 144_665),
    ("baseline", "lander"): (0.18801, 0.8686, 360_773),
    ("partitioned", "lander"): (0.306, 0.6289, 78_101),
}

_ARM_TO_VARIANT = {"p4_baseline": "baseline", "p4_partitioned": "partitioned"}
_ENV_LABEL = {"cartpole": "Cart Pole", "lander": "Lunar Lander"}
_VARIANT_LABEL = {"baseline": "Baseline (monolithic)", "partitioned": "Partitioned 3-way"}


@dataclass(frozen=True)
class TableRow:
    variant: str
    env_id: str
    avg_mse: float
    avg_ssim: float
    model_size: int
    ref_mse: float
    ref_ssim: float
    ref_size: int

    def as_dict(self):
        return dict(self.__dict__)


def out_of_mask_energy(parts, masks):
    """Fraction of each part image's energy outside its true segment.

    ``parts``: (P, N, C, H, W) decoder part outputs; ``masks``: (N, P, H, W)
    boolean ground-truth segments. Returns (P,) fractions in [0, 1].
    """
    parts = np.asarray(parts, dtype=np.float64)
    inside = np.asarray(masks).transpose(1, 0, 2, 3)[:, :, None]   # (P,N,1,H,W)
    total = (parts * parts).sum(axis=(1, 2, 3, 4))
    outside = (parts * parts * ~inside).sum(axis=(1, 2, 3, 4))
    with np.errstate(invalid="ignore"):
        frac = np.where(total > 0.0, outside / total, 0.0)
    return frac


def _read_run(run_dir):
    run_dir = Path(run_dir)
    cfg_path = run_dir / "config.json"
    metrics_path = run_dir / "eval" / "gen_metrics.json"
    if not cfg_path.exists() or not metrics_path.exists():
        return None
    cfg = json.loads(cfg_path.read_text())
    metrics = json.loads(metrics_path.read_text())
    return cfg, metrics


def table1_report(run_dirs):
    """Four-row comparison (variant x env) with reference values alongside.

    Raises MissingRunsError naming every absent (variant, env) cell; an empty
    run set is reported the same way rather than as a partial table.
    """
    found = {}
    for run_dir in run_dirs:
        loaded = _read_run(run_dir)
        if loaded is None:
            continue
        cfg, metrics = loaded
        variant = _ARM_TO_VARIANT.get(cfg["arm"])
        if variant is None:
            continue
        found[(variant, cfg["env_id"])] = metrics

    missing = [f"{v}/{e}" for (v, e) in REFERENCE_TABLE if (v, e) not in found]
    if missing:
        raise MissingRunsError(missing)

    rows = []
    for (variant, env), (ref_mse, ref_ssim, ref_size) in REFERENCE_TABLE.items():
        m = found[(variant, env)]
        rows.append(TableRow(variant, env, m["avg_mse"], m["avg_ssim"],
                             int(m["model_size"]), ref_mse, ref_ssim, ref_size))
    return rows


def render_table(rows):
    """Fenced-text table for standard output."""
    header = (f"{'World model':<22} {'Environment':<13} {'Avg MSE':>9} "
              f"{'Avg SSIM':>9} {'Size':>8} {'Ref MSE':>9} {'Ref SSIM':>9} {'Ref size':>9}")
    lines = ["```", header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{_VARIANT_LABEL[r.variant]:<22} {_ENV_LABEL[r.env_id]:<13} "
            f"{r.avg_mse:>9.5f} {r.avg_ssim:>9.6f} {r.model_size:>8,} "
            f"{r.ref_mse:>9.5f} {r.ref_ssim:>9.6f} {r.ref_size:>9,}")
    lines.append("```")
    return "\n".join(lines)
