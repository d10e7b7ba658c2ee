"""Experiment configuration: one flat dataclass, canonical hash, per-arm defaults.

The config hash (sha256 of the canonical JSON) names the run directory, so
identical configurations land in identical places and anything that changes
the experiment changes the name.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace

from ..errors import ConfigError
from ..sim import constants as C

ARMS = (
    "baseline",
    "p1_structured",
    "p2_equivariant",
    "p3_static",
    "p3_pseudo",
    "p4_partitioned",
    "p4_baseline",
)

TREND_ARMS = ARMS[:5]
P4_ARMS = ARMS[5:]


@dataclass(frozen=True)
class ExperimentConfig:
    env_id: str
    arm: str
    seed: int = 0

    # data
    policy: str = "scripted_stabilize"
    n_episodes: int = 60
    episode_len: int = 70
    resolution: int = 32
    data_seed: int = 0

    # model
    latent_dim: int = 64

    # autoencoder training
    epochs: int = 25
    batch_size: int = 64
    lr: float = 1e-3
    lr_decay: float = 0.97
    beta: float = 1e-3
    sup_weight: float = 5.0
    eq_lambda: float = 1.0
    eq_pairs_per_batch: int = 8
    interval_weight: float = 1.0
    smooth_weight: float = 0.0
    val_fraction: float = 0.1

    # predictor training
    pred_epochs: int = 150
    pred_lr: float = 1e-3

    # partitioned-decoder training
    p4_lambda: float = 0.2

    # evaluation
    horizons: tuple = (1, 5, 10, 20, 50)
    context: int = 10

    def __post_init__(self):
        if self.env_id not in C.ENV_IDS:
            raise ConfigError(f"unknown env_id {self.env_id!r}")
        if self.arm not in ARMS:
            raise ConfigError(f"unknown arm {self.arm!r}; known: {ARMS}")
        if self.resolution % 8:
            raise ConfigError("resolution must be divisible by 8")
        if not 0.0 <= self.val_fraction < 1.0:
            raise ConfigError("val_fraction must be in [0, 1)")
        if self.context < 1 or any(h < 1 for h in self.horizons):
            raise ConfigError("context and horizons must be >= 1")

    @property
    def structured(self):
        return self.arm in ("p1_structured", "p2_equivariant", "p3_static", "p3_pseudo")

    @property
    def supervision(self):
        """Which label set the autoencoder trains on."""
        if self.arm == "p3_static":
            return "STATIC_ONLY"
        if self.arm == "p3_pseudo":
            return "PSEUDO_VELOCITY"
        return "FULL"

    def to_json(self):
        d = asdict(self)
        d["horizons"] = list(self.horizons)
        return json.dumps(d, sort_keys=True, indent=1)

    def hash(self):
        d = asdict(self)
        d["horizons"] = list(self.horizons)
        canon = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:12]

    def run_name(self):
        return f"{self.env_id}_{self.arm}_s{self.seed}_{self.hash()}"

    def with_overrides(self, **kw):
        return replace(self, **kw)


def config_from_json(text):
    d = json.loads(text)
    d["horizons"] = tuple(d["horizons"])
    return ExperimentConfig(**d)


_P4_DEFAULTS = dict(resolution=48, epochs=30, n_episodes=50, episode_len=60)


def config_for_arm(env_id, arm, seed=0, **overrides):
    """Defaults per experiment arm; keyword overrides win."""
    base = dict(env_id=env_id, arm=arm, seed=seed, data_seed=100 + seed)
    if arm in P4_ARMS:
        base.update(_P4_DEFAULTS)
    if arm == "p2_equivariant":
        base.update(eq_lambda=1.0)
    cfg = ExperimentConfig(**base)
    if overrides:
        cfg = cfg.with_overrides(**overrides)
    return cfg
