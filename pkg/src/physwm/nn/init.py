"""Weight initialization."""

from __future__ import annotations

import numpy as np


def uniform_fan_in(rng, shape, fan_in, dtype=np.float32):
    """U(-1/sqrt(fan_in), 1/sqrt(fan_in)), drawn in float64 then cast.

    Drawing in float64 keeps the stream identical whatever dtype the layer
    runs in, so float32 and float64 twins of a model start from the same
    numbers.
    """
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape).astype(dtype)
