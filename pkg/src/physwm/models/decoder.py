"""Convolutional decoder: latent -> sigmoid frame."""

from __future__ import annotations

import numpy as np

from ..nn import ConvTranspose2d, Layer, Linear, ReLU, Reshape, Sequential, Sigmoid


class ConvDecoder(Layer):
    """FC to a seed feature map, then three stride-2 transposed convs.

    ``resolution`` must be divisible by 8; the seed map is resolution/8.
    """

    def __init__(self, in_dim, resolution, rng, widths=(64, 32, 16),
                 dtype=np.float32, name="dec"):
        if resolution % 8:
            raise ValueError(f"resolution must be divisible by 8, got {resolution}")
        self.in_dim = in_dim
        self.resolution = resolution
        side = resolution // 8
        layers = [
            Linear(in_dim, widths[0] * side * side, rng, dtype, name=f"{name}.fc"),
            Reshape((widths[0], side, side)),
            ReLU(),
        ]
        prev = widths[0]
        for i, w in enumerate(widths[1:]):
            layers += [ConvTranspose2d(prev, w, 4, 2, 1, rng, dtype,
                                       name=f"{name}.deconv{i}"), ReLU()]
            prev = w
        layers += [ConvTranspose2d(prev, 3, 4, 2, 1, rng, dtype,
                                   name=f"{name}.deconv{len(widths) - 1}"),
                   Sigmoid()]
        self.net = Sequential(*layers)

    def forward(self, z):
        return self.net.forward(z)

    def backward(self, cache, dy):
        return self.net.backward(cache, dy)
