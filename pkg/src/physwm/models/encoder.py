"""Convolutional encoders producing a Gaussian posterior over the latent.

Both encoders share the forward/backward cache contract of the nn layers:
``forward(x) -> ((mu, logvar), cache)``. Inputs are NCHW float frames.
"""

from __future__ import annotations

import numpy as np

from ..nn import Conv2d, Flatten, Layer, Linear, ReLU, Sequential


def _conv_trunk(in_ch, widths, rng, dtype, name):
    layers = []
    prev = in_ch
    for i, w in enumerate(widths):
        layers += [Conv2d(prev, w, 4, 2, 1, rng, dtype, name=f"{name}.conv{i}"), ReLU()]
        prev = w
    layers.append(Flatten())
    return Sequential(*layers)


def _trunk_out_dim(widths, resolution):
    side = resolution // (2 ** len(widths))
    return widths[-1] * side * side


class ConvEncoder(Layer):
    """Monolithic encoder: conv trunk then linear heads for mu and logvar."""

    def __init__(self, layout, resolution, rng, widths=(16, 32, 64),
                 dtype=np.float32, name="enc"):
        self.layout = layout
        self.resolution = resolution
        self.trunk = _conv_trunk(3, widths, rng, dtype, name)
        feat = _trunk_out_dim(widths, resolution)
        self.head_mu = Linear(feat, layout.latent_dim, rng, dtype, name=f"{name}.mu")
        self.head_logvar = Linear(feat, layout.latent_dim, rng, dtype, name=f"{name}.logvar")

    def forward(self, x):
        feat, trunk_cache = self.trunk.forward(x)
        mu, mu_cache = self.head_mu.forward(feat)
        logvar, lv_cache = self.head_logvar.forward(feat)
        return (mu, logvar), (trunk_cache, mu_cache, lv_cache)

    def backward(self, cache, grads):
        dmu, dlogvar = grads
        trunk_cache, mu_cache, lv_cache = cache
        dfeat = self.head_mu.backward(mu_cache, dmu)
        dfeat += self.head_logvar.backward(lv_cache, dlogvar)
        return self.trunk.backward(trunk_cache, dfeat)


class StructuredEncoder(Layer):
    """Two-branch encoder: a small state branch owns the leading latent block.

    The state branch sees the frame through its own conv stack and writes
    only the state dimensions; the image branch writes the free dimensions.
    Gradients from pixel reconstruction of appearance detail therefore never
    touch the state branch weights.
    """

    def __init__(self, layout, resolution, rng, state_widths=(8, 16, 32),
                 image_widths=(16, 32, 64), dtype=np.float32, name="enc"):
        self.layout = layout
        self.resolution = resolution
        self.state_trunk = _conv_trunk(3, state_widths, rng, dtype, f"{name}.state")
        self.image_trunk = _conv_trunk(3, image_widths, rng, dtype, f"{name}.image")
        sfeat = _trunk_out_dim(state_widths, resolution)
        ifeat = _trunk_out_dim(image_widths, resolution)
        sd, fd = layout.state_dim, layout.free_dim
        self.state_mu = Linear(sfeat, sd, rng, dtype, name=f"{name}.state.mu")
        self.state_logvar = Linear(sfeat, sd, rng, dtype, name=f"{name}.state.logvar")
        self.image_mu = Linear(ifeat, fd, rng, dtype, name=f"{name}.image.mu")
        self.image_logvar = Linear(ifeat, fd, rng, dtype, name=f"{name}.image.logvar")

    def forward(self, x):
        sfeat, s_cache = self.state_trunk.forward(x)
        ifeat, i_cache = self.image_trunk.forward(x)
        smu, smu_c = self.state_mu.forward(sfeat)
        slv, slv_c = self.state_logvar.forward(sfeat)
        imu, imu_c = self.image_mu.forward(ifeat)
        ilv, ilv_c = self.image_logvar.forward(ifeat)
        mu = np.concatenate([smu, imu], axis=1)
        logvar = np.concatenate([slv, ilv], axis=1)
        return (mu, logvar), (s_cache, i_cache, smu_c, slv_c, imu_c, ilv_c)

    def backward(self, cache, grads):
        dmu, dlogvar = grads
        s_cache, i_cache, smu_c, slv_c, imu_c, ilv_c = cache
        sd = self.layout.state_dim
        dsfeat = self.state_mu.backward(smu_c, dmu[:, :sd])
        dsfeat += self.state_logvar.backward(slv_c, dlogvar[:, :sd])
        difeat = self.image_mu.backward(imu_c, dmu[:, sd:])
        difeat += self.image_logvar.backward(ilv_c, dlogvar[:, sd:])
        dx = self.state_trunk.backward(s_cache, dsfeat)
        dx += self.image_trunk.backward(i_cache, difeat)
        return dx
