"""Structural similarity with the standard 11x11 Gaussian window."""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError

_WINDOW = 11
_SIGMA = 1.5
_C1 = 0.01 ** 2
_C2 = 0.03 ** 2


def _gaussian_kernel():
    r = np.arange(_WINDOW, dtype=np.float64) - (_WINDOW - 1) / 2.0
    g = np.exp(-(r * r) / (2.0 * _SIGMA * _SIGMA))
    k = np.outer(g, g)
    return k / k.sum()


_KERNEL = _gaussian_kernel()


def _local_mean(img):
    # valid-mode Gaussian filtering: only windows fully inside the image
    win = np.lib.stride_tricks.sliding_window_view(img, (_WINDOW, _WINDOW))
    return np.einsum("ijkl,kl->ij", win, _KERNEL)


def _ssim_plane(x, y):
    mx, my = _local_mean(x), _local_mean(y)
    mxx, myy, mxy = _local_mean(x * x), _local_mean(y * y), _local_mean(x * y)
    vx = mxx - mx * mx
    vy = myy - my * my
    cov = mxy - mx * my
    num = (2.0 * mx * my + _C1) * (2.0 * cov + _C2)
    den = (mx * mx + my * my + _C1) * (vx + vy + _C2)
    return float(np.mean(num / den))


def ssim(x, y):
    """Mean SSIM over all channels/leading axes; spatial dims are the last two.

    Inputs must share a shape, hold values in [0, 1], and be at least 11x11.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ShapeError(f"shape mismatch: {x.shape} vs {y.shape}")
    if x.ndim < 2 or x.shape[-1] < _WINDOW or x.shape[-2] < _WINDOW:
        raise ShapeError(f"spatial dims must be >= {_WINDOW}x{_WINDOW}, got {x.shape}")
    planes_x = x.reshape((-1,) + x.shape[-2:])
    planes_y = y.reshape((-1,) + y.shape[-2:])
    return float(np.mean([_ssim_plane(a, b) for a, b in zip(planes_x, planes_y)]))
