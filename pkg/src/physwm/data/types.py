"""Dataset value types.

Episodes store frames as uint8 and masks as bool, exactly as rendered; the
float view used by training (pixels / 255) is derived on demand. This keeps
memory bounded and makes byte-level determinism checks direct.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..sim import constants as C

FULL = "FULL"
STATIC_ONLY = "STATIC_ONLY"
INTERVAL = "INTERVAL"
NONE = "NONE"
SUPERVISION_LEVELS = (FULL, STATIC_ONLY, INTERVAL, NONE)


@dataclass(frozen=True)
class SupervisionSpec:
    level: str
    interval_bounds: dict | None = None  # dim -> (a, b), raw units
    label_fraction: float = 1.0

    def __post_init__(self):
        if self.level not in SUPERVISION_LEVELS:
            raise ConfigError(f"unknown supervision level {self.level!r}")
        if not 0.0 <= self.label_fraction <= 1.0:
            raise ConfigError(f"label_fraction must be in [0,1], got {self.label_fraction}")
        if self.level == INTERVAL:
            if not self.interval_bounds:
                raise ConfigError("INTERVAL supervision requires interval_bounds")
            for dim, (a, b) in self.interval_bounds.items():
                if a > b:
                    raise ConfigError(f"dim {dim}: interval a={a} > b={b}")

    def supervised_dims(self, env_id):
        if self.level == FULL:
            return tuple(range(C.STATE_DIMS[env_id]))
        if self.level == STATIC_ONLY:
            return C.STATIC_DIMS[env_id]
        if self.level == INTERVAL:
            return tuple(sorted(self.interval_bounds))
        return ()


@dataclass
class EpisodeLabels:
    """Per-episode supervision attachment; absent on unlabeled episodes."""

    level: str
    supervised_dims: tuple
    values: np.ndarray | None          # (T, len(dims)) raw units, or None
    interval_bounds: dict | None = None


@dataclass
class Episode:
    env_id: str
    seed: int
    dt: float
    states: np.ndarray                 # (T, state_dim) float64
    actions: np.ndarray                # (T, action_dim) float64
    pixels: np.ndarray                 # (T, H, W, 3) uint8
    masks: np.ndarray                  # (T, 3, H, W) bool
    labels: EpisodeLabels | None = None

    def __len__(self):
        return self.states.shape[0]

    @property
    def resolution(self):
        return self.pixels.shape[1]

    def frames_f32(self):
        """(T, 3, H, W) float32 in [0,1], the training view."""
        return np.ascontiguousarray(
            self.pixels.transpose(0, 3, 1, 2).astype(np.float32) / 255.0)

    def states_norm(self):
        return C.normalize_state(self.env_id, self.states)


@dataclass(frozen=True)
class LabeledSample:
    """One step's supervision view, resolved from the episode labels."""

    observation_index: int
    supervised_dims: tuple
    supervised_values: np.ndarray | None
    interval_bounds: dict | None


@dataclass
class Dataset:
    env_id: str
    policy: str
    seed: int
    dt: float
    resolution: int
    episodes: list = field(default_factory=list)

    def __len__(self):
        return len(self.episodes)

    def n_frames(self):
        return sum(len(e) for e in self.episodes)

    def sample_view(self, episode_index, t):
        ep = self.episodes[episode_index]
        lab = ep.labels
        if lab is None or lab.level == NONE:
            return LabeledSample(t, (), None, None)
        values = None if lab.values is None else lab.values[t]
        return LabeledSample(t, lab.supervised_dims, values, lab.interval_bounds)
