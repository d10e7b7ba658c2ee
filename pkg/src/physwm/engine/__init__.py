"""Experiment configuration and training loops."""

from .config import (
    ARMS,
    P4_ARMS,
    TREND_ARMS,
    ExperimentConfig,
    config_for_arm,
    config_from_json,
)
from .records import History
from .schedule import lr_at
from .trainer import (
    FlatData,
    encode_sequences,
    flatten,
    label_dataset,
    split_episodes,
    train_autoencoder,
    train_partitioned,
    train_predictor,
)

__all__ = [
    "ARMS",
    "P4_ARMS",
    "TREND_ARMS",
    "ExperimentConfig",
    "config_for_arm",
    "config_from_json",
    "History",
    "lr_at",
    "FlatData",
    "encode_sequences",
    "flatten",
    "label_dataset",
    "split_episodes",
    "train_autoencoder",
    "train_partitioned",
    "train_predictor",
]
