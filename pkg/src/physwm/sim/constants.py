"""Constants table, parsed from the shipped ``constants.ini``.

The INI file is the single source for physical parameters, renderer geometry,
and normalization scales. Values are exposed as frozen dataclasses so typos
fail loudly at import time rather than mid-experiment.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from importlib import resources

import numpy as np

CARTPOLE = "cartpole"
LANDER = "lander"
ENV_IDS = (CARTPOLE, LANDER)

STATE_NAMES = {
    CARTPOLE: ("x", "x_dot", "theta", "theta_dot"),
    LANDER: ("x", "y", "x_dot", "y_dot", "theta", "theta_dot", "leg_left", "leg_right"),
}
STATE_DIMS = {CARTPOLE: 4, LANDER: 8}

# Position/angle indices ("static" information) and their velocity partners.
STATIC_DIMS = {CARTPOLE: (0, 2), LANDER: (0, 1, 4, 6, 7)}
VELOCITY_OF = {
    CARTPOLE: {0: 1, 2: 3},
    LANDER: {0: 2, 1: 3, 4: 5},
}

SEGMENT_NAMES = {
    CARTPOLE: ("cart", "pole", "background"),
    LANDER: ("lander", "terrain", "background"),
}


def _color(text):
    r, g, b = (int(v) for v in text.split())
    return (r, g, b)


@dataclass(frozen=True)
class CartpoleConstants:
    gravity: float
    cart_mass: float
    pole_mass: float
    pole_half_length: float
    force_max: float
    dt_default: float
    euler_substeps: int
    x_limit: float
    xdot_limit: float
    theta_limit: float
    thetadot_limit: float

    @property
    def total_mass(self):
        return self.cart_mass + self.pole_mass

    def state_box(self):
        hi = np.array([self.x_limit, self.xdot_limit, self.theta_limit, self.thetadot_limit])
        return -hi, hi


@dataclass(frozen=True)
class LanderConstants:
    gravity: float
    mass: float
    inertia: float
    main_thrust_max: float
    side_torque_max: float
    dt_default: float
    euler_substeps: int
    terrain_height: float
    body_half_width: float
    body_half_height: float
    leg_half_width: float
    leg_length: float
    leg_attach_x: float
    x_limit: float
    y_min: float
    y_max: float
    v_limit: float
    theta_limit: float
    thetadot_limit: float

    def state_box(self):
        lo = np.array([-self.x_limit, self.y_min, -self.v_limit, -self.v_limit,
                       -self.theta_limit, -self.thetadot_limit, 0.0, 0.0])
        hi = np.array([self.x_limit, self.y_max, self.v_limit, self.v_limit,
                       self.theta_limit, self.thetadot_limit, 1.0, 1.0])
        return lo, hi


@dataclass(frozen=True)
class CartpoleRender:
    pixels_per_meter_64: float
    ground_row_frac: float
    cart_width: float
    cart_height: float
    pole_draw_length: float
    pole_width: float
    track_thickness: float
    color_background: tuple
    color_track: tuple
    color_cart: tuple
    color_pole: tuple

    def pixels_per_meter(self, resolution):
        return self.pixels_per_meter_64 * resolution / 64.0


@dataclass(frozen=True)
class LanderRender:
    pixels_per_meter_64: float
    y_view_min: float
    pad_half_width: float
    pad_thickness: float
    color_background: tuple
    color_terrain: tuple
    color_pad: tuple
    color_body: tuple
    color_leg: tuple

    def pixels_per_meter(self, resolution):
        return self.pixels_per_meter_64 * resolution / 64.0


def _load():
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    with resources.files("physwm.sim").joinpath("constants.ini").open("r") as fh:
        parser.read_file(fh)

    cp = parser["cartpole"]
    cartpole = CartpoleConstants(
        gravity=cp.getfloat("gravity"),
        cart_mass=cp.getfloat("cart_mass"),
        pole_mass=cp.getfloat("pole_mass"),
        pole_half_length=cp.getfloat("pole_half_length"),
        force_max=cp.getfloat("force_max"),
        dt_default=cp.getfloat("dt_default"),
        euler_substeps=cp.getint("euler_substeps"),
        x_limit=cp.getfloat("x_limit"),
        xdot_limit=cp.getfloat("xdot_limit"),
        theta_limit=cp.getfloat("theta_limit"),
        thetadot_limit=cp.getfloat("thetadot_limit"),
    )

    ld = parser["lander"]
    lander = LanderConstants(
        gravity=ld.getfloat("gravity"),
        mass=ld.getfloat("mass"),
        inertia=ld.getfloat("inertia"),
        main_thrust_max=ld.getfloat("main_thrust_max"),
        side_torque_max=ld.getfloat("side_torque_max"),
        dt_default=ld.getfloat("dt_default"),
        euler_substeps=ld.getint("euler_substeps"),
        terrain_height=ld.getfloat("terrain_height"),
        body_half_width=ld.getfloat("body_half_width"),
        body_half_height=ld.getfloat("body_half_height"),
        leg_half_width=ld.getfloat("leg_half_width"),
        leg_length=ld.getfloat("leg_length"),
        leg_attach_x=ld.getfloat("leg_attach_x"),
        x_limit=ld.getfloat("x_limit"),
        y_min=ld.getfloat("y_min"),
        y_max=ld.getfloat("y_max"),
        v_limit=ld.getfloat("v_limit"),
        theta_limit=ld.getfloat("theta_limit"),
        thetadot_limit=ld.getfloat("thetadot_limit"),
    )

    rc = parser["render_cartpole"]
    render_cartpole = CartpoleRender(
        pixels_per_meter_64=rc.getfloat("pixels_per_meter_64"),
        ground_row_frac=rc.getfloat("ground_row_frac"),
        cart_width=rc.getfloat("cart_width"),
        cart_height=rc.getfloat("cart_height"),
        pole_draw_length=rc.getfloat("pole_draw_length"),
        pole_width=rc.getfloat("pole_width"),
        track_thickness=rc.getfloat("track_thickness"),
        color_background=_color(rc["color_background"]),
        color_track=_color(rc["color_track"]),
        color_cart=_color(rc["color_cart"]),
        color_pole=_color(rc["color_pole"]),
    )

    rl = parser["render_lander"]
    render_lander = LanderRender(
        pixels_per_meter_64=rl.getfloat("pixels_per_meter_64"),
        y_view_min=rl.getfloat("y_view_min"),
        pad_half_width=rl.getfloat("pad_half_width"),
        pad_thickness=rl.getfloat("pad_thickness"),
        color_background=_color(rl["color_background"]),
        color_terrain=_color(rl["color_terrain"]),
        color_pad=_color(rl["color_pad"]),
        color_body=_color(rl["color_body"]),
        color_leg=_color(rl["color_leg"]),
    )

    return cartpole, lander, render_cartpole, render_lander


CARTPOLE_CONSTANTS, LANDER_CONSTANTS, CARTPOLE_RENDER, LANDER_RENDER = _load()


def physics(env_id):
    if env_id == CARTPOLE:
        return CARTPOLE_CONSTANTS
    if env_id == LANDER:
        return LANDER_CONSTANTS
    raise ValueError(f"unknown env_id {env_id!r}")


def state_box(env_id):
    return physics(env_id).state_box()


def state_center(env_id):
    """Valid-box center, the shift used for state normalization."""
    lo, hi = state_box(env_id)
    return (lo + hi) / 2.0


def state_scales(env_id):
    """Valid-box half-widths, the per-dimension normalization scales."""
    lo, hi = state_box(env_id)
    return (hi - lo) / 2.0


def normalize_state(env_id, values):
    """Map raw state values into the roughly [-1, 1] normalized frame."""
    return (np.asarray(values, dtype=np.float64) - state_center(env_id)) / state_scales(env_id)


def denormalize_state(env_id, values):
    return np.asarray(values, dtype=np.float64) * state_scales(env_id) + state_center(env_id)
