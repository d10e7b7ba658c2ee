"""Latent-sequence predictor: two-layer LSTM with a linear readout."""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from ..nn import LSTM, Layer, Linear


class LatentPredictor(Layer):
    """Predicts z_{t+1} from z_{<=t}.

    Teacher-forced training uses ``forward`` on full sequences; evaluation
    warms the hidden state on a context window and then rolls out closed
    loop, feeding its own predictions back in.
    """

    def __init__(self, latent_dim, rng, hidden_dim=64, num_layers=2,
                 dtype=np.float32, name="pred"):
        self.latent_dim = latent_dim
        self.lstm = LSTM(latent_dim, hidden_dim, num_layers, rng, dtype, name=f"{name}.lstm")
        self.head = Linear(hidden_dim, latent_dim, rng, dtype, name=f"{name}.head")

    def forward(self, z_seq):
        """z_seq (T, N, D) -> (z_next_hat (T, N, D), cache)."""
        hs, lstm_cache = self.lstm.forward(z_seq)
        t_len, batch, hid = hs.shape
        flat, head_cache = self.head.forward(hs.reshape(t_len * batch, hid))
        return flat.reshape(t_len, batch, self.latent_dim), (lstm_cache, head_cache, hs.shape)

    def backward(self, cache, dy):
        lstm_cache, head_cache, hs_shape = cache
        t_len, batch, hid = hs_shape
        dflat = self.head.backward(head_cache, dy.reshape(t_len * batch, self.latent_dim))
        return self.lstm.backward(lstm_cache, dflat.reshape(hs_shape))

    def rollout(self, context, horizon):
        """Closed-loop prediction.

        context (T0, N, D): observed latents; the model is stepped through
        all of them, then fed its own outputs. Returns (horizon, N, D): the
        predictions for the `horizon` steps after the context window.
        """
        if context.shape[0] < 1:
            raise ShapeError("rollout needs at least one context step")
        state = self.lstm.init_state(context.shape[1], context.dtype)
        h = None
        for t in range(context.shape[0]):
            h, state = self.lstm.forward_step(context[t], state)
        out = np.empty((horizon, context.shape[1], self.latent_dim), dtype=context.dtype)
        z, _ = self.head.forward(h)
        out[0] = z
        for t in range(1, horizon):
            h, state = self.lstm.forward_step(out[t - 1], state)
            z, _ = self.head.forward(h)
            out[t] = z
        return out
