"""VAE wrapper: encoder, reparameterized sample, decoder."""

from __future__ import annotations

import numpy as np

from ..nn import Layer
from .decoder import ConvDecoder
from .encoder import ConvEncoder, StructuredEncoder


def reparameterize(mu, logvar, rng):
    """z = mu + exp(logvar/2) * eps with eps ~ N(0, I); returns (z, eps)."""
    eps = rng.standard_normal(mu.shape).astype(mu.dtype)
    return mu + np.exp(0.5 * logvar) * eps, eps


def reparameterize_backward(logvar, eps, dz):
    """Route dL/dz to (dmu, dlogvar) for the sample above."""
    return dz, dz * eps * 0.5 * np.exp(0.5 * logvar)


class VAE(Layer):
    """Encoder + decoder pair sharing one latent layout.

    ``forward`` runs the full training path (sample from the posterior);
    ``encode_mu``/``decode`` give the deterministic eval path.
    """

    def __init__(self, encoder, decoder, layout):
        self.encoder = encoder
        self.decoder = decoder
        self.layout = layout

    @classmethod
    def build(cls, layout, resolution, rng, structured=False, dtype=np.float32):
        if structured:
            enc = StructuredEncoder(layout, resolution, rng, dtype=dtype)
        else:
            enc = ConvEncoder(layout, resolution, rng, dtype=dtype)
        dec = ConvDecoder(layout.latent_dim, resolution, rng, dtype=dtype)
        return cls(enc, dec, layout)

    def forward(self, x, rng):
        (mu, logvar), enc_cache = self.encoder.forward(x)
        z, eps = reparameterize(mu, logvar, rng)
        x_hat, dec_cache = self.decoder.forward(z)
        return (x_hat, mu, logvar, z), (enc_cache, dec_cache, logvar, eps)

    def backward(self, cache, grads):
        """grads = (dx_hat, dmu, dlogvar, dz); any entry may be None."""
        dx_hat, dmu, dlogvar, dz = grads
        enc_cache, dec_cache, logvar, eps = cache
        dz_total = np.zeros_like(logvar) if dz is None else dz.copy()
        if dx_hat is not None:
            dz_total += self.decoder.backward(dec_cache, dx_hat)
        dmu_r, dlv_r = reparameterize_backward(logvar, eps, dz_total)
        dmu_total = dmu_r if dmu is None else dmu_r + dmu
        dlv_total = dlv_r if dlogvar is None else dlv_r + dlogvar
        return self.encoder.backward(enc_cache, (dmu_total, dlv_total))

    def encode_mu(self, x):
        (mu, _), _ = self.encoder.forward(x)
        return mu

    def decode(self, z):
        x_hat, _ = self.decoder.forward(z)
        return x_hat
