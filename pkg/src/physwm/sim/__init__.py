"""Simulators, exact renderer, and state-space transforms."""

from .constants import (
    CARTPOLE,
    CARTPOLE_CONSTANTS,
    ENV_IDS,
    LANDER,
    LANDER_CONSTANTS,
    SEGMENT_NAMES,
    STATE_DIMS,
    STATE_NAMES,
    STATIC_DIMS,
    VELOCITY_OF,
    denormalize_state,
    normalize_state,
    physics,
    state_box,
    state_center,
    state_scales,
)
from .dynamics import (
    cartpole_energy,
    cartpole_step,
    lander_step,
    reference_step,
    step,
    terminal,
)
from .render import part_targets, render, render_cartpole, render_lander
from .transforms import (
    apply_transform,
    feasible_range,
    kinds_for,
    normalized_shift,
    observation_pair,
    sample_transform,
)
from .types import (
    ROTATE_POLE,
    TRANSFORM_KINDS,
    TRANSLATE_CART,
    TRANSLATE_LANDER,
    Action,
    Observation,
    PhysState,
    StateTransform,
    wrap_angle,
)

__all__ = [
    "CARTPOLE", "LANDER", "ENV_IDS", "CARTPOLE_CONSTANTS", "LANDER_CONSTANTS",
    "STATE_NAMES", "STATE_DIMS", "STATIC_DIMS", "VELOCITY_OF", "SEGMENT_NAMES",
    "physics", "state_box", "state_center", "state_scales",
    "normalize_state", "denormalize_state",
    "PhysState", "Action", "Observation", "StateTransform", "wrap_angle",
    "TRANSFORM_KINDS", "TRANSLATE_CART", "ROTATE_POLE", "TRANSLATE_LANDER",
    "step", "cartpole_step", "lander_step", "reference_step", "terminal",
    "cartpole_energy",
    "render", "render_cartpole", "render_lander", "part_targets",
    "apply_transform", "feasible_range", "normalized_shift",
    "observation_pair", "sample_transform", "kinds_for",
]
