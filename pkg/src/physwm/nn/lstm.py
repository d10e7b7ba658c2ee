"""Multi-layer LSTM with full backpropagation through time.

Sequence layout is (T, N, D). Gate order inside the packed weight matrices is
(input, forget, cell, output). All LSTM weights use the conventional
U(-1/sqrt(H), 1/sqrt(H)) init.
"""

from __future__ import annotations

import numpy as np

from .init import uniform_fan_in
from .layers import Layer, Parameter


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


class LSTM(Layer):
    def __init__(self, input_dim, hidden_dim, num_layers, rng, dtype=np.float32,
                 name="lstm"):
        self.input_dim, self.hidden_dim, self.num_layers = input_dim, hidden_dim, num_layers
        self.w_ih, self.w_hh, self.b = [], [], []
        for layer in range(num_layers):
            d = input_dim if layer == 0 else hidden_dim
            self.w_ih.append(Parameter(
                f"{name}.l{layer}.w_ih",
                uniform_fan_in(rng, (d, 4 * hidden_dim), hidden_dim, dtype)))
            self.w_hh.append(Parameter(
                f"{name}.l{layer}.w_hh",
                uniform_fan_in(rng, (hidden_dim, 4 * hidden_dim), hidden_dim, dtype)))
            self.b.append(Parameter(
                f"{name}.l{layer}.b",
                uniform_fan_in(rng, (4 * hidden_dim,), hidden_dim, dtype)))

    def parameters(self):
        out = []
        for layer in range(self.num_layers):
            out += [self.w_ih[layer], self.w_hh[layer], self.b[layer]]
        return out

    def init_state(self, batch, dtype=None):
        dtype = dtype or self.w_ih[0].value.dtype
        h = self.hidden_dim
        return [(np.zeros((batch, h), dtype=dtype), np.zeros((batch, h), dtype=dtype))
                for _ in range(self.num_layers)]

    def _cell(self, layer, x_t, h_prev, c_prev):
        hid = self.hidden_dim
        gates = (x_t @ self.w_ih[layer].value + h_prev @ self.w_hh[layer].value
                 + self.b[layer].value)
        i = _sigmoid(gates[:, :hid])
        f = _sigmoid(gates[:, hid:2 * hid])
        g = np.tanh(gates[:, 2 * hid:3 * hid])
        o = _sigmoid(gates[:, 3 * hid:])
        c = f * c_prev + i * g
        tc = np.tanh(c)
        h = o * tc
        return h, c, (x_t, h_prev, c_prev, i, f, g, o, tc)

    def forward(self, x, state=None):
        """x (T, N, D) -> (hs (T, N, H), cache). Initial state defaults to zeros."""
        t_len, batch = x.shape[:2]
        state = state or self.init_state(batch, x.dtype)
        layer_caches = []
        seq = x
        for layer in range(self.num_layers):
            h, c = state[layer]
            hs = np.empty((t_len, batch, self.hidden_dim), dtype=x.dtype)
            caches = []
            for t in range(t_len):
                h, c, cache = self._cell(layer, seq[t], h, c)
                hs[t] = h
                caches.append(cache)
            layer_caches.append(caches)
            seq = hs
        return seq, (x.shape, layer_caches)

    def backward(self, cache, dhs):
        x_shape, layer_caches = cache
        t_len = x_shape[0]
        hid = self.hidden_dim
        d_seq = dhs
        for layer in reversed(range(self.num_layers)):
            caches = layer_caches[layer]
            w_ih, w_hh, b = self.w_ih[layer], self.w_hh[layer], self.b[layer]
            d_in = np.zeros((t_len,) + caches[0][0].shape, dtype=dhs.dtype)
            dh_next = np.zeros_like(d_seq[0])
            dc_next = np.zeros((d_seq.shape[1], hid), dtype=dhs.dtype)
            dw_ih = np.zeros_like(w_ih.value)
            dw_hh = np.zeros_like(w_hh.value)
            db = np.zeros_like(b.value)
            for t in reversed(range(t_len)):
                x_t, h_prev, c_prev, i, f, g, o, tc = caches[t]
                dh = d_seq[t] + dh_next
                dc = dc_next + dh * o * (1.0 - tc * tc)
                do = dh * tc * o * (1.0 - o)
                di = dc * g * i * (1.0 - i)
                df = dc * c_prev * f * (1.0 - f)
                dg = dc * i * (1.0 - g * g)
                dgates = np.concatenate([di, df, dg, do], axis=1)
                dw_ih += x_t.T @ dgates
                dw_hh += h_prev.T @ dgates
                db += dgates.sum(axis=0)
                d_in[t] = dgates @ w_ih.value.T
                dh_next = dgates @ w_hh.value.T
                dc_next = dc * f
            w_ih.grad += dw_ih
            w_hh.grad += dw_hh
            b.grad += db
            d_seq = d_in
        return d_seq

    def forward_step(self, x_t, state):
        """Single-step inference for closed-loop rollout; no cache kept."""
        new_state = []
        h_in = x_t
        for layer in range(self.num_layers):
            h, c, _ = self._cell(layer, h_in, *state[layer])
            new_state.append((h, c))
            h_in = h
        return h_in, new_state
