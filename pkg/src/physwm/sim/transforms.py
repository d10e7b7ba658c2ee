"""State-space transforms and transformed observation pairs.

A transform g adds a scalar magnitude to one interpretable state dimension
(cart position, pole angle, or lander position). Applying g to the state and
re-rendering yields the image-space counterpart f, giving supervision pairs
(render(s), render(g s)) without any pixel-space warping.
"""

from __future__ import annotations

from ..errors import TransformOutOfBoundsError
from . import constants as C
from .render import render
from .types import TRANSFORM_ENV, TRANSFORM_KINDS, PhysState, StateTransform


def feasible_range(state, kind):
    """Magnitude interval keeping the transformed dimension inside the valid box."""
    t = StateTransform(kind)
    if state.env_id != t.env_id:
        raise ValueError(f"{kind} does not apply to {state.env_id} states")
    lo, hi = C.state_box(state.env_id)
    v = state.values[t.dim]
    return (lo[t.dim] - v, hi[t.dim] - v)


def apply_transform(state, transform):
    """Apply g to the state; raise if the result leaves the valid box."""
    if state.env_id != transform.env_id:
        raise ValueError(f"{transform.kind} does not apply to {state.env_id} states")
    lo, hi = feasible_range(state, transform.kind)
    m = transform.magnitude
    if not (lo <= m <= hi):
        raise TransformOutOfBoundsError(
            f"{transform.kind} magnitude {m:+.4g} leaves the valid box",
            feasible_range=(lo, hi))
    values = state.values.copy()
    values[transform.dim] += m
    return PhysState(state.env_id, values)


def normalized_shift(transform):
    """The transform's additive effect on the normalized state dimension.

    This is the latent-space action of g on an aligned representation: add
    this amount to the latent dimension carrying the transformed quantity.
    """
    scale = C.state_scales(transform.env_id)[transform.dim]
    return transform.magnitude / scale


def observation_pair(state, transform, resolution=64):
    """(render(s), render(g s), g s) for an equivariance supervision pair."""
    moved = apply_transform(state, transform)
    return render(state, resolution), render(moved, resolution), moved


def sample_transform(state, kind, rng, max_fraction=0.5):
    """Draw a random in-box transform of the given kind for this state.

    The magnitude is uniform over the feasible range shrunk by
    ``max_fraction``, so pairs stay well inside the box and renderable.
    The shrink is toward zero when zero is feasible; for states outside
    the box on this dimension (scripted episodes may drift past the edge)
    the range is one-sided and shrinks toward its center instead.
    """
    lo, hi = feasible_range(state, kind)
    center = 0.0 if lo <= 0.0 <= hi else (lo + hi) / 2.0
    a = center + (lo - center) * max_fraction
    b = center + (hi - center) * max_fraction
    m = float(rng.uniform(a, b))
    return StateTransform(kind, m)


def kinds_for(env_id):
    """Transform kinds applicable to an environment."""
    return tuple(k for k in TRANSFORM_KINDS if TRANSFORM_ENV[k] == env_id)
