"""Exact segmentation renderer.

Every shape is rasterized by testing pixel centers against its analytic
outline: a pixel belongs to a shape iff its center does. No antialiasing, no
blending. Colors are flat uint8 triples, so a rendered frame survives a PNG
round trip bit-for-bit, and the three segment masks are exact by
construction: they partition the frame because they are defined by shape
membership with a fixed occlusion priority.

Camera conventions (both environments): the camera is static, x grows to the
right, world y grows upward while image rows grow downward. A pixel (row r,
col c) has its center at image coordinates (c + 0.5, r + 0.5).
"""

from __future__ import annotations

import math

import numpy as np

from . import constants as C
from .types import Observation

_GRID_CACHE = {}


def _pixel_centers(resolution):
    """Image-coordinate centers, cached per resolution: (cols+0.5, rows+0.5)."""
    if resolution not in _GRID_CACHE:
        r = np.arange(resolution, dtype=np.float64) + 0.5
        _GRID_CACHE[resolution] = np.meshgrid(r, r)  # (px_x, px_y), each (H, W)
    return _GRID_CACHE[resolution]


def _rect_mask(wx, wy, center, half_w, half_h, theta=0.0):
    """Pixels whose centers fall inside a (possibly rotated) rectangle.

    ``theta`` rotates the rectangle counterclockwise in world coordinates.
    Boundary pixels (center exactly on the outline) count as inside.
    """
    dx = wx - center[0]
    dy = wy - center[1]
    if theta == 0.0:
        u, v = dx, dy
    else:
        cos, sin = math.cos(theta), math.sin(theta)
        u = cos * dx + sin * dy
        v = -sin * dx + cos * dy
    return (np.abs(u) <= half_w) & (np.abs(v) <= half_h)


def render_cartpole(state, resolution=64):
    """Render one cart-pole frame with masks (cart, pole, background).

    The cart is painted over the pole, so the cart mask is the full cart
    rectangle regardless of pole angle; a pure pole rotation can never touch
    it. The track is a color detail inside the background segment.
    """
    r = C.CARTPOLE_RENDER
    ppm = r.pixels_per_meter(resolution)
    px_x, px_y = _pixel_centers(resolution)

    # World coordinates of pixel centers. x = 0 is the image center column,
    # y = 0 is the track top at ground_row_frac of the image height.
    ground_y = r.ground_row_frac * resolution
    wx = (px_x - resolution / 2.0) / ppm
    wy = (ground_y - px_y) / ppm

    x, theta = state.values[0], state.values[2]
    cart_center = (x, r.cart_height / 2.0)
    in_cart = _rect_mask(wx, wy, cart_center, r.cart_width / 2.0, r.cart_height / 2.0)

    # Pole: a rod of draw length L from the pivot (cart top center), tilted
    # by theta from vertical; theta > 0 leans to the right.
    pivot = (x, r.cart_height)
    half_len = r.pole_draw_length / 2.0
    pole_center = (pivot[0] + half_len * math.sin(theta),
                   pivot[1] + half_len * math.cos(theta))
    # The rod's long axis is at angle (pi/2 - theta) from the world x axis.
    in_pole = _rect_mask(wx, wy, pole_center, half_len, r.pole_width / 2.0,
                         theta=math.pi / 2.0 - theta)

    in_track = (wy <= 0.0) & (wy >= -r.track_thickness)

    img = np.empty((resolution, resolution, 3), dtype=np.uint8)
    img[...] = r.color_background
    img[in_track] = r.color_track
    img[in_pole] = r.color_pole
    img[in_cart] = r.color_cart

    cart_mask = in_cart
    pole_mask = in_pole & ~in_cart
    background = ~(cart_mask | pole_mask)
    masks = np.stack([cart_mask, pole_mask, background])
    return Observation(img.astype(np.float32) / 255.0, masks)


def _lander_shapes(state, wx, wy):
    k = C.LANDER_CONSTANTS
    x, y, theta = state.values[0], state.values[1], state.values[4]
    in_body = _rect_mask(wx, wy, (x, y), k.body_half_width, k.body_half_height, theta)
    sin, cos = math.sin(theta), math.cos(theta)
    legs = []
    for sign in (-1.0, 1.0):
        # Leg strut center in the body frame, rotated into the world.
        bx = sign * k.leg_attach_x
        by = -(k.body_half_height + k.leg_length / 2.0)
        center = (x + bx * cos - by * sin, y + bx * sin + by * cos)
        legs.append(_rect_mask(wx, wy, center, k.leg_half_width,
                               k.leg_length / 2.0, theta))
    return in_body, legs


def render_lander(state, resolution=64):
    """Render one lander frame with masks (lander, terrain, background).

    The lander is painted over the terrain; the pad marker is a color detail
    inside the terrain segment.
    """
    k = C.LANDER_CONSTANTS
    r = C.LANDER_RENDER
    ppm = r.pixels_per_meter(resolution)
    px_x, px_y = _pixel_centers(resolution)
    wx = (px_x - resolution / 2.0) / ppm
    wy = r.y_view_min + (resolution - px_y) / ppm

    in_body, legs = _lander_shapes(state, wx, wy)
    in_lander = in_body | legs[0] | legs[1]
    in_terrain = wy <= k.terrain_height
    in_pad = in_terrain & (np.abs(wx) <= r.pad_half_width) & \
        (wy >= k.terrain_height - r.pad_thickness)

    img = np.empty((resolution, resolution, 3), dtype=np.uint8)
    img[...] = r.color_background
    img[in_terrain] = r.color_terrain
    img[in_pad] = r.color_pad
    img[legs[0]] = r.color_leg
    img[legs[1]] = r.color_leg
    img[in_body] = r.color_body

    lander_mask = in_lander
    terrain_mask = in_terrain & ~in_lander
    background = ~(lander_mask | terrain_mask)
    masks = np.stack([lander_mask, terrain_mask, background])
    return Observation(img.astype(np.float32) / 255.0, masks)


def render(state, resolution=64):
    if state.env_id == C.CARTPOLE:
        return render_cartpole(state, resolution)
    return render_lander(state, resolution)


def part_targets(observation):
    """Per-segment image targets: the frame with everything else blanked.

    Returns (3, H, W, 3) float32; part i is ``pixels * masks[i]``.
    """
    return observation.pixels[None] * observation.masks[..., None].astype(np.float32)
