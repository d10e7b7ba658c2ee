"""Partitioned generative decoders and the monolithic baseline they replace.

The partitioned model maps the normalized physical state straight to three
segment images composed by pixel-wise maximum; it has no encoder, because the
interpretable state IS its code. The baseline is a small autoencoder whose
learned bottleneck matches the state dimensionality, encoder included in the
parameter count: that encoder is the price of not having an interpretable
code.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from ..nn import (
    Conv2d,
    ConvTranspose2d,
    Flatten,
    Layer,
    Linear,
    ReLU,
    Reshape,
    Sequential,
    Sigmoid,
)
from ..sim import constants as C


def _upsample_stage(in_ch, out_ch, factor, rng, dtype, name):
    if factor == 2:
        return ConvTranspose2d(in_ch, out_ch, 4, 2, 1, rng, dtype, name=name)
    if factor == 4:
        return ConvTranspose2d(in_ch, out_ch, 8, 4, 2, rng, dtype, name=name)
    raise ValueError(f"unsupported upsample factor {factor}")


class PartDecoder(Layer):
    """One segment generator: linear seed map, one transposed conv, sigmoid."""

    def __init__(self, in_dim, resolution, rng, channels=16, seed_side=None,
                 dtype=np.float32, name="part"):
        self.in_dim = in_dim
        self.resolution = resolution
        seed_side = seed_side or resolution // 2
        factor = resolution // seed_side
        self.net = Sequential(
            Linear(in_dim, channels * seed_side * seed_side, rng, dtype, name=f"{name}.fc"),
            Reshape((channels, seed_side, seed_side)),
            ReLU(),
            _upsample_stage(channels, 3, factor, rng, dtype, f"{name}.deconv"),
            Sigmoid(),
        )

    def forward(self, z):
        return self.net.forward(z)

    def backward(self, cache, dy):
        return self.net.backward(cache, dy)


class PartitionedDecoderSet(Layer):
    """Three part decoders plus the max composition.

    ``forward`` returns (parts (3, N, 3, H, W), composed (N, 3, H, W)).
    The max is subdifferentiable; backward routes the composed gradient to
    the part attaining the max (first part wins ties, deterministically).
    """

    def __init__(self, env_id, resolution, rng, channels=16, seed_side=None,
                 dtype=np.float32, name="partset"):
        self.env_id = env_id
        self.in_dim = C.STATE_DIMS[env_id]
        self.resolution = resolution
        self.decoders = [
            PartDecoder(self.in_dim, resolution, rng, channels, seed_side,
                        dtype, name=f"{name}.{seg}")
            for seg in C.SEGMENT_NAMES[env_id]
        ]

    def forward(self, z):
        if z.ndim != 2 or z.shape[1] != self.in_dim:
            raise ShapeError(f"expected (N, {self.in_dim}) state batch, got {z.shape}")
        outs, caches = zip(*(d.forward(z) for d in self.decoders))
        parts = np.stack(outs)
        winner = parts.argmax(axis=0)
        composed = np.take_along_axis(parts, winner[None], axis=0)[0]
        return (parts, composed), (caches, winner)

    def backward(self, cache, grads):
        """grads = (dparts (3, N, 3, H, W) or None, dcomposed or None)."""
        dparts, dcomposed = grads
        caches, winner = cache
        ref = dcomposed if dcomposed is not None else dparts
        total = np.zeros((len(self.decoders),) + winner.shape, dtype=ref.dtype)
        if dparts is not None:
            total += dparts
        if dcomposed is not None:
            sel = np.take_along_axis(total, winner[None], axis=0)
            np.put_along_axis(total, winner[None], sel + dcomposed[None], axis=0)
        dz = None
        for dec, c, dy in zip(self.decoders, caches, total):
            g = dec.backward(c, dy)
            dz = g if dz is None else dz + g
        return dz

    def decode_state(self, state):
        """parts and composed frame for one PhysState."""
        z = C.normalize_state(self.env_id, state.values)[None].astype(
            self.decoders[0].net.layers[0].w.dtype)
        (parts, composed), _ = self.forward(z)
        return parts[:, 0], composed[0]


class TinyAutoencoder(Layer):
    """Monolithic baseline: frames through a state-sized uninterpretable code.

    Decoder is one linear layer plus two convolutional stages, mirroring the
    combined width of the three part decoders (3x their channel count at the
    same seed resolution).
    """

    def __init__(self, env_id, resolution, rng, dtype=np.float32, name="tiny"):
        self.env_id = env_id
        self.resolution = resolution
        code = C.STATE_DIMS[env_id]
        side = resolution // 8
        feat = 64 * side * side
        self.encoder = Sequential(
            Conv2d(3, 16, 4, 2, 1, rng, dtype, name=f"{name}.enc0"), ReLU(),
            Conv2d(16, 32, 4, 2, 1, rng, dtype, name=f"{name}.enc1"), ReLU(),
            Conv2d(32, 64, 4, 2, 1, rng, dtype, name=f"{name}.enc2"), ReLU(),
            Flatten(),
            Linear(feat, code, rng, dtype, name=f"{name}.code"),
        )
        if env_id == C.CARTPOLE:
            seed_side = resolution // 2
            self.decoder = Sequential(
                Linear(code, 48 * seed_side * seed_side, rng, dtype, name=f"{name}.fc"),
                Reshape((48, seed_side, seed_side)),
                ReLU(),
                ConvTranspose2d(48, 32, 4, 2, 1, rng, dtype, name=f"{name}.dec0"),
                ReLU(),
                Conv2d(32, 3, 3, 1, 1, rng, dtype, name=f"{name}.dec1"),
                Sigmoid(),
            )
        else:
            seed_side = resolution // 4
            self.decoder = Sequential(
                Linear(code, 48 * seed_side * seed_side, rng, dtype, name=f"{name}.fc"),
                Reshape((48, seed_side, seed_side)),
                ReLU(),
                ConvTranspose2d(48, 32, 4, 2, 1, rng, dtype, name=f"{name}.dec0"),
                ReLU(),
                ConvTranspose2d(32, 3, 4, 2, 1, rng, dtype, name=f"{name}.dec1"),
                Sigmoid(),
            )

    def forward(self, x):
        code, enc_cache = self.encoder.forward(x)
        x_hat, dec_cache = self.decoder.forward(code)
        return x_hat, (enc_cache, dec_cache)

    def backward(self, cache, dy):
        enc_cache, dec_cache = cache
        dcode = self.decoder.backward(dec_cache, dy)
        return self.encoder.backward(enc_cache, dcode)
