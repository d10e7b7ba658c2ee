"""Episode generation."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from ..sim import constants as C
from ..sim import dynamics as D
from ..sim.render import render
from .policies import RANDOM, get_policy, initial_state
from .types import Dataset, Episode


def generate(env_id, policy="scripted_stabilize", n_episodes=10, episode_len=100,
             seed=0, resolution=64, dt=None):
    """Roll out episodes under a policy; deterministic given the seed.

    Each episode draws its rng from SeedSequence(seed).spawn, so episodes
    are independent of each other and of n_episodes ordering. Random-policy
    episodes are truncated when the next state would be terminal.
    """
    if n_episodes < 1 or episode_len < 1:
        raise ConfigError("n_episodes and episode_len must be >= 1")
    if env_id not in C.ENV_IDS:
        raise ConfigError(f"unknown env_id {env_id!r}")
    policy_fn = get_policy(env_id, policy)
    dt = dt if dt is not None else C.physics(env_id).dt_default
    children = np.random.SeedSequence(seed).spawn(n_episodes)
    episodes = []
    for k, child in enumerate(children):
        rng = np.random.default_rng(child)
        state = initial_state(env_id, rng)
        states, actions, pixels, masks = [], [], [], []
        for _ in range(episode_len):
            obs = render(state, resolution)
            action = policy_fn(state, rng)
            states.append(state.values)
            actions.append(action.as_array())
            pixels.append(obs.pixels_u8())
            masks.append(obs.masks)
            state = D.step(state, action, dt)
            if policy == RANDOM and D.terminal(state):
                break
        episodes.append(Episode(
            env_id=env_id, seed=k, dt=dt,
            states=np.array(states), actions=np.array(actions),
            pixels=np.array(pixels), masks=np.array(masks)))
    return Dataset(env_id=env_id, policy=policy, seed=seed, dt=dt,
                   resolution=resolution, episodes=episodes)
