"""Layers: dense, conv, transposed conv, activations, containers.

Convolutions use im2col with strided slicing (one vectorized copy per kernel
offset) and a single batched GEMM, which is the right trade on a CPU: the k^2
python loop is tiny next to the matmul. col2im is the exact adjoint, built
from the same slices with ``+=``.
"""

from __future__ import annotations

import numpy as np

from .init import uniform_fan_in


class Parameter:
    """A named weight array with an accumulated gradient."""

    __slots__ = ("name", "value", "grad")

    def __init__(self, name, value):
        self.name = name
        self.value = value
        self.grad = np.zeros_like(value)

    @property
    def dtype(self):
        return self.value.dtype

    def zero_grad(self):
        self.grad[...] = 0.0


class Layer:
    """Base: parameter bookkeeping plus the forward/backward contract."""

    def parameters(self):
        out = []
        for v in self.__dict__.values():
            if isinstance(v, Parameter):
                out.append(v)
            elif isinstance(v, Layer):
                out.extend(v.parameters())
            elif isinstance(v, (list, tuple)):
                for item in v:
                    if isinstance(item, Layer):
                        out.extend(item.parameters())
        return out

    def zero_grad(self):
        for p in self.parameters():
            p.zero_grad()

    def forward(self, x):
        raise NotImplementedError

    def backward(self, cache, dy):
        raise NotImplementedError

    def __call__(self, x):
        return self.forward(x)


class Linear(Layer):
    def __init__(self, in_dim, out_dim, rng, dtype=np.float32, name="linear"):
        self.in_dim, self.out_dim = in_dim, out_dim
        self.w = Parameter(f"{name}.w",
                           uniform_fan_in(rng, (in_dim, out_dim), in_dim, dtype))
        self.b = Parameter(f"{name}.b",
                           uniform_fan_in(rng, (out_dim,), in_dim, dtype))

    def forward(self, x):
        return x @ self.w.value + self.b.value, x

    def backward(self, cache, dy):
        x = cache
        self.w.grad += x.reshape(-1, self.in_dim).T @ dy.reshape(-1, self.out_dim)
        self.b.grad += dy.reshape(-1, self.out_dim).sum(axis=0)
        return dy @ self.w.value.T


def _out_size(size, k, stride, pad):
    return (size + 2 * pad - k) // stride + 1


def _im2col(x, kh, kw, stride, pad):
    """(N, C, H, W) -> (N, C*kh*kw, oh*ow) patch matrix."""
    n, c, h, w = x.shape
    oh, ow = _out_size(h, kh, stride, pad), _out_size(w, kw, stride, pad)
    if pad:
        x = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    cols = np.empty((n, c, kh, kw, oh, ow), dtype=x.dtype)
    for i in range(kh):
        for j in range(kw):
            cols[:, :, i, j] = x[:, :, i:i + stride * oh:stride, j:j + stride * ow:stride]
    return cols.reshape(n, c * kh * kw, oh * ow), (oh, ow)


def _col2im(cols, x_shape, kh, kw, stride, pad, oh, ow):
    """Adjoint of _im2col: scatter-add patches back to (N, C, H, W)."""
    n, c, h, w = x_shape
    out = np.zeros((n, c, h + 2 * pad, w + 2 * pad), dtype=cols.dtype)
    cols = cols.reshape(n, c, kh, kw, oh, ow)
    for i in range(kh):
        for j in range(kw):
            out[:, :, i:i + stride * oh:stride, j:j + stride * ow:stride] += cols[:, :, i, j]
    if pad:
        out = out[:, :, pad:-pad, pad:-pad]
    return out


class Conv2d(Layer):
    """NCHW convolution. Weight (out_ch, in_ch, k, k)."""

    def __init__(self, in_ch, out_ch, kernel, stride=1, pad=0, rng=None,
                 dtype=np.float32, name="conv"):
        self.in_ch, self.out_ch = in_ch, out_ch
        self.kernel, self.stride, self.pad = kernel, stride, pad
        fan_in = in_ch * kernel * kernel
        self.w = Parameter(f"{name}.w", uniform_fan_in(
            rng, (out_ch, in_ch, kernel, kernel), fan_in, dtype))
        self.b = Parameter(f"{name}.b", uniform_fan_in(rng, (out_ch,), fan_in, dtype))

    def forward(self, x):
        k = self.kernel
        cols, (oh, ow) = _im2col(x, k, k, self.stride, self.pad)
        w_mat = self.w.value.reshape(self.out_ch, -1)
        y = np.matmul(w_mat[None], cols) + self.b.value[None, :, None]
        return y.reshape(x.shape[0], self.out_ch, oh, ow), (x.shape, cols, oh, ow)

    def backward(self, cache, dy):
        x_shape, cols, oh, ow = cache
        k = self.kernel
        dy_mat = dy.reshape(dy.shape[0], self.out_ch, oh * ow)
        self.w.grad += np.einsum("nfl,nkl->fk", dy_mat, cols).reshape(self.w.value.shape)
        self.b.grad += dy_mat.sum(axis=(0, 2))
        w_mat = self.w.value.reshape(self.out_ch, -1)
        dcols = np.matmul(w_mat.T[None], dy_mat)
        return _col2im(dcols, x_shape, k, k, self.stride, self.pad, oh, ow)


class ConvTranspose2d(Layer):
    """NCHW transposed convolution, the exact adjoint of Conv2d.

    Weight (in_ch, out_ch, k, k); output spatial size (H-1)*stride - 2*pad + k.
    """

    def __init__(self, in_ch, out_ch, kernel, stride=1, pad=0, rng=None,
                 dtype=np.float32, name="deconv"):
        self.in_ch, self.out_ch = in_ch, out_ch
        self.kernel, self.stride, self.pad = kernel, stride, pad
        # Fan-in of the dual conv: each output pixel touches at most
        # in_ch * ceil(k/stride)^2 inputs; use the conventional in_ch*k*k.
        fan_in = in_ch * kernel * kernel
        self.w = Parameter(f"{name}.w", uniform_fan_in(
            rng, (in_ch, out_ch, kernel, kernel), fan_in, dtype))
        self.b = Parameter(f"{name}.b", uniform_fan_in(rng, (out_ch,), fan_in, dtype))

    def out_size(self, in_size):
        return (in_size - 1) * self.stride - 2 * self.pad + self.kernel

    def forward(self, x):
        n, _, h, w = x.shape
        k = self.kernel
        oh, ow = self.out_size(h), self.out_size(w)
        x_mat = x.reshape(n, self.in_ch, h * w)
        w_mat = self.w.value.reshape(self.in_ch, -1)
        cols = np.matmul(w_mat.T[None], x_mat)
        out_shape = (n, self.out_ch, oh, ow)
        y = _col2im(cols, out_shape, k, k, self.stride, self.pad, h, w)
        return y + self.b.value[None, :, None, None], (x.shape, x_mat, oh, ow)

    def backward(self, cache, dy):
        x_shape, x_mat, oh, ow = cache
        n, _, h, w = x_shape
        k = self.kernel
        cols_dy, _ = _im2col(dy, k, k, self.stride, self.pad)
        self.w.grad += np.einsum("nfl,nkl->fk", x_mat, cols_dy).reshape(self.w.value.shape)
        self.b.grad += dy.sum(axis=(0, 2, 3))
        w_mat = self.w.value.reshape(self.in_ch, -1)
        dx = np.matmul(w_mat[None], cols_dy)
        return dx.reshape(x_shape)


class ReLU(Layer):
    def forward(self, x):
        mask = x > 0
        return x * mask, mask

    def backward(self, cache, dy):
        return dy * cache


class Sigmoid(Layer):
    def forward(self, x):
        y = 1.0 / (1.0 + np.exp(-x))
        return y, y

    def backward(self, cache, dy):
        y = cache
        return dy * y * (1.0 - y)


class Flatten(Layer):
    def forward(self, x):
        return x.reshape(x.shape[0], -1), x.shape

    def backward(self, cache, dy):
        return dy.reshape(cache)


class Reshape(Layer):
    """Reshape trailing dimensions; leading batch dimension is kept."""

    def __init__(self, shape):
        self.shape = tuple(shape)

    def forward(self, x):
        return x.reshape((x.shape[0],) + self.shape), x.shape

    def backward(self, cache, dy):
        return dy.reshape(cache)


class Sequential(Layer):
    def __init__(self, *layers):
        self.layers = list(layers)

    def forward(self, x):
        caches = []
        for layer in self.layers:
            x, cache = layer.forward(x)
            caches.append(cache)
        return x, caches

    def backward(self, caches, dy):
        for layer, cache in zip(reversed(self.layers), reversed(caches)):
            dy = layer.backward(cache, dy)
        return dy
