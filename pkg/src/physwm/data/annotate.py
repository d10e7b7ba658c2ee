"""Supervision annotation and pseudo-labels."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..errors import ShapeError
from ..sim import constants as C
from .types import INTERVAL, NONE, Dataset, EpisodeLabels, SupervisionSpec


def annotate(dataset, spec, seed=0):
    """Attach supervision tags per the spec; replaces any existing labels.

    label_fraction selects a deterministic subset of episodes (a seeded
    permutation), so annotating twice with the same arguments is a no-op.
    """
    n = len(dataset.episodes)
    n_labeled = int(round(spec.label_fraction * n))
    order = np.random.default_rng(seed).permutation(n)
    labeled_set = set(order[:n_labeled].tolist())
    episodes = []
    for k, ep in enumerate(dataset.episodes):
        if k not in labeled_set or spec.level == NONE:
            labels = EpisodeLabels(NONE, (), None)
        else:
            dims = spec.supervised_dims(dataset.env_id)
            if spec.level == INTERVAL:
                labels = EpisodeLabels(spec.level, dims, None,
                                       dict(spec.interval_bounds))
            else:
                labels = EpisodeLabels(spec.level, dims,
                                       ep.states[:, list(dims)].copy())
        episodes.append(replace(ep, labels=labels))
    return replace(dataset, episodes=episodes)


@dataclass(frozen=True)
class PseudoLabels:
    """Estimated labels; ``source`` says how, so they can never be mistaken
    for ground truth downstream."""

    dims: tuple
    values: np.ndarray
    source: str = "central_difference"


def velocity_pseudo_labels(episode, position_dims=None):
    """Velocity estimates from position differences.

    Interior steps use the central difference (p[t+1] - p[t-1]) / (2 dt);
    the endpoints use one-sided first differences. Returns PseudoLabels over
    the VELOCITY dims corresponding to the given position dims.
    """
    if len(episode) < 3:
        raise ShapeError(f"need at least 3 steps, got {len(episode)}")
    vel_of = C.VELOCITY_OF[episode.env_id]
    if position_dims is None:
        position_dims = tuple(sorted(vel_of))
    for d in position_dims:
        if d not in vel_of:
            raise ShapeError(f"dim {d} has no velocity counterpart")
    p = episode.states[:, list(position_dims)]
    dt = episode.dt
    v = np.empty_like(p)
    v[1:-1] = (p[2:] - p[:-2]) / (2.0 * dt)
    v[0] = (p[1] - p[0]) / dt
    v[-1] = (p[-1] - p[-2]) / dt
    return PseudoLabels(tuple(vel_of[d] for d in position_dims), v)


def attach_pseudo_velocity(dataset, seed=0, label_fraction=1.0):
    """STATIC_ONLY ground truth plus pseudo-velocity estimates, merged.

    This is the weak-supervision arm: positions/angles are measured, the
    velocity slots are filled by central differences of those measurements.
    """
    from .types import STATIC_ONLY
    base = annotate(dataset, SupervisionSpec(STATIC_ONLY,
                                             label_fraction=label_fraction), seed)
    episodes = []
    for ep in base.episodes:
        if ep.labels.level == NONE:
            episodes.append(ep)
            continue
        static_dims = ep.labels.supervised_dims
        pos_dims = tuple(d for d in static_dims
                         if d in C.VELOCITY_OF[dataset.env_id])
        pseudo = velocity_pseudo_labels(ep, pos_dims)
        dims = tuple(static_dims) + pseudo.dims
        values = np.concatenate([ep.labels.values, pseudo.values], axis=1)
        order = np.argsort(dims)
        labels = EpisodeLabels("PSEUDO_VELOCITY",
                               tuple(int(dims[i]) for i in order),
                               values[:, order])
        episodes.append(replace(ep, labels=labels))
    return replace(base, episodes=episodes)
