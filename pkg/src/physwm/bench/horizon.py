"""Closed-loop state-prediction error over increasing horizons.

Protocol: encode a short context of frames to posterior means, roll the
predictor forward without further observations, read the leading latent
dims as (normalized) physical state, and score them against ground truth.
MSE is reported in normalized state units so environments are comparable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError


@dataclass(frozen=True)
class HorizonReport:
    """Per-horizon prediction MSE for one variant on one environment."""

    env_id: str
    variant: str
    horizons: tuple
    mean: tuple
    std: tuple
    n_samples: int = 0   # windows (single run) or seeds (aggregate)

    def __post_init__(self):
        hs = tuple(int(h) for h in self.horizons)
        if any(b <= a for a, b in zip(hs, hs[1:])) or not hs:
            raise ShapeError(f"horizons must be strictly increasing, got {hs}")
        if not (len(hs) == len(self.mean) == len(self.std)):
            raise ShapeError("one mean/std entry required per horizon")
        for m, s in zip(self.mean, self.std):
            if not (np.isfinite(m) and np.isfinite(s) and m >= 0.0 and s >= 0.0):
                raise ShapeError("MSE entries must be finite and non-negative")

    def as_dict(self):
        return {
            "env_id": self.env_id,
            "variant": self.variant,
            "horizons": list(self.horizons),
            "mean": list(self.mean),
            "std": list(self.std),
            "n_samples": self.n_samples,
        }


def _encode_fn(encoder):
    return encoder.encode_mu if hasattr(encoder, "encode_mu") else encoder


def window_errors(encoder, predictor, layout, episodes, horizons=(1, 5, 10, 20, 50),
                  context_len=10):
    """Per-window squared errors: array (n_windows, n_horizons)."""
    horizons = tuple(int(h) for h in horizons)
    if context_len < 1:
        raise ShapeError("context_len must be >= 1")
    if layout.state_dim == 0:
        raise ShapeError("layout has no supervised state dims")
    max_h = max(horizons)
    encode = _encode_fn(encoder)
    sd = layout.state_dim

    contexts, truths = [], []
    for ep in episodes:
        t_len = len(ep)
        need = context_len + max_h
        if t_len < need:
            raise ShapeError(
                f"episode length {t_len} < context {context_len} + horizon {max_h}")
        z = encode(ep.frames_f32())                       # (T, L)
        gt = ep.states_norm()                             # (T, sd)
        for start in range(0, t_len - need + 1):
            contexts.append(z[start:start + context_len])
            truths.append(gt[start + context_len:start + need])
    context = np.stack(contexts, axis=1)                  # (ctx, W, L)
    truth = np.stack(truths, axis=1)                      # (max_h, W, sd)

    rolled = predictor.rollout(context, max_h)            # (max_h, W, L)
    pred_state = np.asarray(rolled)[:, :, :sd]
    sq = (pred_state - truth) ** 2                        # (max_h, W, sd)
    per_window = sq.mean(axis=2)                          # mean per dim
    return np.stack([per_window[h - 1] for h in horizons], axis=1)


def horizon_state_mse(encoder, predictor, layout, episodes,
                      horizons=(1, 5, 10, 20, 50), context_len=10,
                      variant="unnamed"):
    """Evaluate one trained run; mean/std taken across evaluation windows."""
    errs = window_errors(encoder, predictor, layout, episodes, horizons, context_len)
    return HorizonReport(
        env_id=layout.env_id,
        variant=variant,
        horizons=tuple(int(h) for h in horizons),
        mean=tuple(float(v) for v in errs.mean(axis=0)),
        std=tuple(float(v) for v in errs.std(axis=0)),
        n_samples=errs.shape[0],
    )


def aggregate_reports(reports, variant=None):
    """Combine per-seed reports: mean and std of the per-seed means."""
    if not reports:
        raise ShapeError("no reports to aggregate")
    first = reports[0]
    for r in reports[1:]:
        if r.horizons != first.horizons or r.env_id != first.env_id:
            raise ShapeError("reports must share env and horizon grid")
    means = np.array([r.mean for r in reports])           # (seeds, horizons)
    return HorizonReport(
        env_id=first.env_id,
        variant=variant or first.variant,
        horizons=first.horizons,
        mean=tuple(float(v) for v in means.mean(axis=0)),
        std=tuple(float(v) for v in means.std(axis=0)),
        n_samples=len(reports),
    )
