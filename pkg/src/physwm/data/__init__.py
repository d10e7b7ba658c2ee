"""Dataset generation, supervision annotation, and on-disk format."""

from .annotate import PseudoLabels, annotate, attach_pseudo_velocity, velocity_pseudo_labels
from .generate import generate
from .io import FORMAT_VERSION, dataset_hash, datasets_equal, load, save
from .policies import POLICIES, RANDOM, SCRIPTED, get_policy, initial_state
from .types import (
    FULL,
    INTERVAL,
    NONE,
    STATIC_ONLY,
    SUPERVISION_LEVELS,
    Dataset,
    Episode,
    EpisodeLabels,
    LabeledSample,
    SupervisionSpec,
)

__all__ = [
    "generate", "annotate", "velocity_pseudo_labels", "attach_pseudo_velocity",
    "PseudoLabels", "save", "load", "dataset_hash", "datasets_equal",
    "FORMAT_VERSION", "Dataset", "Episode", "EpisodeLabels", "LabeledSample",
    "SupervisionSpec", "SUPERVISION_LEVELS", "FULL", "STATIC_ONLY", "INTERVAL",
    "NONE", "POLICIES", "RANDOM", "SCRIPTED", "get_policy", "initial_state",
]
