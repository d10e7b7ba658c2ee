"""Value types shared by the simulators: states, actions, observations, transforms."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidActionError, InvalidStateError
from . import constants as C

TRANSLATE_CART = "translate_cart"
ROTATE_POLE = "rotate_pole"
TRANSLATE_LANDER = "translate_lander"
TRANSFORM_KINDS = (TRANSLATE_CART, ROTATE_POLE, TRANSLATE_LANDER)

# State index touched by each transform kind.
TRANSFORM_DIM = {TRANSLATE_CART: 0, ROTATE_POLE: 2, TRANSLATE_LANDER: 0}
TRANSFORM_ENV = {TRANSLATE_CART: C.CARTPOLE, ROTATE_POLE: C.CARTPOLE,
                 TRANSLATE_LANDER: C.LANDER}


def wrap_angle(theta):
    """Wrap an angle to (-pi, pi]."""
    wrapped = np.mod(-theta + np.pi, 2.0 * np.pi)
    return -(wrapped - np.pi)


@dataclass(frozen=True)
class PhysState:
    """Ground-truth physical state: 4 dims for cartpole, 8 for lander."""

    env_id: str
    values: np.ndarray

    def __post_init__(self):
        if self.env_id not in C.ENV_IDS:
            raise InvalidStateError(f"unknown env_id {self.env_id!r}")
        values = np.asarray(self.values, dtype=np.float64)
        expect = C.STATE_DIMS[self.env_id]
        if values.shape != (expect,):
            raise InvalidStateError(
                f"{self.env_id} state must have shape ({expect},), got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InvalidStateError(f"non-finite state values: {values}")
        theta_idx = C.STATE_NAMES[self.env_id].index("theta")
        values = values.copy()
        values[theta_idx] = wrap_angle(values[theta_idx])
        if self.env_id == C.LANDER:
            legs = values[6:8]
            if not np.all(np.isin(legs, (0.0, 1.0))):
                raise InvalidStateError(f"leg contact flags must be binary, got {legs}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __getitem__(self, idx):
        return self.values[idx]

    def replace_values(self, values):
        return PhysState(self.env_id, np.asarray(values, dtype=np.float64))

    def within_box(self):
        lo, hi = C.state_box(self.env_id)
        return bool(np.all(self.values >= lo - 1e-12) and np.all(self.values <= hi + 1e-12))


@dataclass(frozen=True)
class Action:
    """Environment action.

    cartpole: a single horizontal force in {-force_max, 0, +force_max}.
    lander:   (main_thrust in [0, 1], side_thrust in [-1, 1]).
    """

    env_id: str
    value: tuple | float

    def __post_init__(self):
        if self.env_id == C.CARTPOLE:
            force = float(self.value)
            allowed = (-C.CARTPOLE_CONSTANTS.force_max, 0.0, C.CARTPOLE_CONSTANTS.force_max)
            if force not in allowed:
                raise InvalidActionError(f"cartpole force must be one of {allowed}, got {force}")
            object.__setattr__(self, "value", force)
        elif self.env_id == C.LANDER:
            main, side = (float(v) for v in self.value)
            if not (0.0 <= main <= 1.0 and -1.0 <= side <= 1.0):
                raise InvalidActionError(
                    f"lander action out of bounds: main={main}, side={side}")
            object.__setattr__(self, "value", (main, side))
        else:
            raise InvalidActionError(f"unknown env_id {self.env_id!r}")

    def as_array(self):
        if self.env_id == C.CARTPOLE:
            return np.array([self.value])
        return np.array(self.value)


@dataclass(frozen=True)
class Observation:
    """Rendered RGB frame plus the three exact segment masks.

    ``pixels`` is float32 in [0, 1] with values on the 1/255 grid, so the
    uint8 image is recoverable exactly. ``masks`` is (3, H, W) bool; the
    masks are pairwise disjoint and cover every pixel.
    """

    pixels: np.ndarray
    masks: np.ndarray

    @property
    def resolution(self):
        return self.pixels.shape[:2]

    def pixels_u8(self):
        return np.round(self.pixels * 255.0).astype(np.uint8)


@dataclass(frozen=True)
class StateTransform:
    """A named state-space transform with a scalar magnitude (m or rad)."""

    kind: str
    magnitude: float = field(default=0.0)

    def __post_init__(self):
        if self.kind not in TRANSFORM_KINDS:
            raise ValueError(f"unknown transform kind {self.kind!r}")

    @property
    def env_id(self):
        return TRANSFORM_ENV[self.kind]

    @property
    def dim(self):
        return TRANSFORM_DIM[self.kind]
