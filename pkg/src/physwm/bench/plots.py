"""Horizon-MSE figures with byte-stable CSV twins."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def _csv_text(reports):
    lines = ["env_id,variant,horizon,mean,std"]
    for rep in sorted(reports, key=lambda r: (r.env_id, r.variant)):
        for h, m, s in zip(rep.horizons, rep.mean, rep.std):
            lines.append(f"{rep.env_id},{rep.variant},{h},{m!r},{s!r}")
    return "\n".join(lines) + "\n"


def emit_plots(reports, out_dir):
    """One MSE-vs-horizon figure per environment plus one CSV per figure.

    The CSV is the source of record: identical reports yield identical bytes.
    Returns the written paths.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    by_env = {}
    for rep in reports:
        by_env.setdefault(rep.env_id, []).append(rep)

    for env_id in sorted(by_env):
        env_reports = sorted(by_env[env_id], key=lambda r: r.variant)
        fig, ax = plt.subplots(figsize=(5.2, 3.6))
        for rep in env_reports:
            mean = list(rep.mean)
            std = list(rep.std)
            ax.plot(rep.horizons, mean, marker="o", label=rep.variant)
            lo = [max(m - s, 1e-12) for m, s in zip(mean, std)]
            hi = [m + s for m, s in zip(mean, std)]
            ax.fill_between(rep.horizons, lo, hi, alpha=0.15)
        ax.set_yscale("log")
        ax.set_xlabel("prediction horizon (steps)")
        ax.set_ylabel("state MSE (normalized units)")
        ax.set_title(env_id)
        ax.legend()
        fig.tight_layout()
        png = out_dir / f"horizon_mse_{env_id}.png"
        fig.savefig(png, dpi=130)
        plt.close(fig)
        csv = out_dir / f"horizon_mse_{env_id}.csv"
        csv.write_text(_csv_text(env_reports))
        written.extend([png, csv])
    return written
