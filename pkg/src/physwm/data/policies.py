"""Scripted and random data-collection policies.

Scripted policies are deterministic functions of the current state, so the
closed-loop system is autonomous: its latent flow is something a sequence
model can actually learn. Random policies give broad but non-stationary
coverage and are truncated at terminal states by the generator.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from ..sim import constants as C
from ..sim.types import Action

RANDOM = "random"
SCRIPTED = "scripted_stabilize"
POLICIES = (RANDOM, SCRIPTED)

# Cartpole bang-bang PD: gains on (theta, theta_dot, x, x_dot) and the
# deadband below which the force stays off. Tuned for slow, data-rich
# convergence that still keeps |theta| < 0.4 from the sampled start box.
CP_GAINS = (14.0, 3.0, 0.9, 1.4)
CP_DEADBAND = 0.5

# Lander hover target and PD gains; thrust_hover = m g / T_max.
LD_TARGET = (0.0, 5.5)
LD_KY, LD_KVY = 0.35, 0.6
LD_KX, LD_KVX = 0.12, 0.22
LD_KTH, LD_KTHD = 6.0, 2.5
LD_THETA_CMD_MAX = 0.25


def cartpole_scripted(state, rng=None):
    x, x_dot, theta, theta_dot = state.values
    kt, ktd, kx, kxd = CP_GAINS
    u = kt * theta + ktd * theta_dot + kx * x + kxd * x_dot
    f = C.CARTPOLE_CONSTANTS.force_max
    if u > CP_DEADBAND:
        return Action(C.CARTPOLE, f)
    if u < -CP_DEADBAND:
        return Action(C.CARTPOLE, -f)
    return Action(C.CARTPOLE, 0.0)


def cartpole_random(state, rng):
    f = C.CARTPOLE_CONSTANTS.force_max
    return Action(C.CARTPOLE, float(rng.choice((-f, 0.0, f))))


def lander_scripted(state, rng=None):
    k = C.LANDER_CONSTANTS
    x, y, x_dot, y_dot, theta, theta_dot = state.values[:6]
    tx, ty = LD_TARGET
    hover = k.mass * k.gravity / k.main_thrust_max
    main = hover + LD_KY * (ty - y) - LD_KVY * y_dot
    # Lateral: command a small tilt against the position error, then track it.
    theta_cmd = np.clip(-LD_KX * (tx - x) + LD_KVX * x_dot,
                        -LD_THETA_CMD_MAX, LD_THETA_CMD_MAX)
    side = LD_KTH * (theta_cmd - theta) - LD_KTHD * theta_dot
    return Action(C.LANDER, (float(np.clip(main, 0.0, 1.0)),
                             float(np.clip(side, -1.0, 1.0))))


def lander_random(state, rng):
    return Action(C.LANDER, (float(rng.uniform(0.0, 1.0)),
                             float(rng.uniform(-1.0, 1.0))))


def get_policy(env_id, name):
    table = {
        (C.CARTPOLE, RANDOM): cartpole_random,
        (C.CARTPOLE, SCRIPTED): cartpole_scripted,
        (C.LANDER, RANDOM): lander_random,
        (C.LANDER, SCRIPTED): lander_scripted,
    }
    try:
        return table[(env_id, name)]
    except KeyError:
        raise ConfigError(f"no policy {name!r} for {env_id!r}") from None


def initial_state(env_id, rng):
    """Starting states drawn from a sub-box of the valid region.

    The sub-box is wide in positions (coverage comes from transients) and
    modest in velocities so scripted runs stay controllable.
    """
    if env_id == C.CARTPOLE:
        v = np.array([
            rng.uniform(-1.8, 1.8),
            rng.uniform(-0.8, 0.8),
            rng.uniform(-0.22, 0.22),
            rng.uniform(-0.8, 0.8),
        ])
        from ..sim.types import PhysState
        return PhysState(C.CARTPOLE, v)
    v = np.array([
        rng.uniform(-2.5, 2.5),
        rng.uniform(3.0, 9.0),
        rng.uniform(-0.6, 0.6),
        rng.uniform(-0.6, 0.6),
        rng.uniform(-0.25, 0.25),
        rng.uniform(-0.3, 0.3),
        0.0, 0.0,
    ])
    from ..sim.types import PhysState
    return PhysState(C.LANDER, v)
