"""Loss terms, each with a gradient companion, plus the weighted registry.

Conventions, used everywhere without exception:
  - image/vector MSEs are mean-per-element;
  - the KL term sums over latent dims and averages over the batch;
  - the equivariance distance is a summed square over dims (a true squared
    L2 distance), scaled by lam/N and averaged over the batch;
  - smoothness and interval penalties are the literal formulas below.

Value functions are pure; ``*_grad`` companions return d(loss)/d(argument)
for the same inputs. Training code composes them; tests check each against
central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError


# ---------------------------------------------------------------------------
# transform pairs

@dataclass(frozen=True)
class LatentShift:
    """g: additive affine map touching only the declared latent dims.

    Empty ``dims`` is the identity, the invariance case.
    """

    dims: tuple = ()
    offsets: tuple = ()

    def __post_init__(self):
        if len(self.dims) != len(self.offsets):
            raise ShapeError("dims and offsets must pair up")

    @property
    def is_identity(self):
        return len(self.dims) == 0

    def apply(self, z):
        out = np.array(z, copy=True)
        for d, o in zip(self.dims, self.offsets):
            out[..., d] += o
        return out


@dataclass(frozen=True)
class TransformPair:
    """(f, g): an observation transform paired with its latent counterpart.

    ``f`` is whatever produced the transformed observation (kept only as a
    label here; rendering happens in the simkit); ``g`` is the LatentShift.
    """

    f_kind: str
    g: LatentShift = field(default_factory=LatentShift)


# ---------------------------------------------------------------------------
# elementary terms

def mse(a, b):
    """Mean-per-element squared error."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    d = a - b
    return float(np.mean(d * d))


def mse_grad(a, b):
    """d mse / d a."""
    a, b = np.asarray(a), np.asarray(b)
    return 2.0 * (a - b) / a.size


def kl_to_unit(mu, logvar):
    """KL(N(mu, diag exp(logvar)) || N(0, I)): sum over dims, mean over batch."""
    mu, logvar = np.asarray(mu), np.asarray(logvar)
    per_dim = 0.5 * (mu * mu + np.exp(logvar) - 1.0 - logvar)
    if per_dim.ndim == 1:
        return float(per_dim.sum())
    return float(per_dim.sum(axis=-1).mean())


def kl_to_unit_grad(mu, logvar):
    mu, logvar = np.asarray(mu), np.asarray(logvar)
    batch = 1 if mu.ndim == 1 else mu.shape[0]
    dmu = mu / batch
    dlogvar = 0.5 * (np.exp(logvar) - 1.0) / batch
    return dmu, dlogvar


def reconstruction_elbo(x, x_hat, mu, logvar, beta=1.0):
    """Mean-per-element reconstruction MSE plus beta-weighted KL."""
    return mse(x_hat, x) + beta * kl_to_unit(mu, logvar)


def structured_branch_loss(branches):
    """Weighted sum of per-branch MSEs.

    ``branches``: [(output, target, weight)]. Returns (total, per_branch).
    """
    per_branch = []
    total = 0.0
    for output, target, weight in branches:
        value = mse(output, target)
        per_branch.append(value)
        total += weight * value
    return total, per_branch


# ---------------------------------------------------------------------------
# equivariance

def equivariance_value(enc_fx, g_enc_x, lam=1.0):
    """(lam/N) sum over pairs of ||enc(f(x)) - g(enc(x))||^2, batch-averaged.

    ``enc_fx`` and ``g_enc_x``: (N_pairs, batch, latent) or (N_pairs, latent).
    """
    enc_fx, g_enc_x = np.asarray(enc_fx), np.asarray(g_enc_x)
    if enc_fx.shape != g_enc_x.shape:
        raise ShapeError(f"shape mismatch {enc_fx.shape} vs {g_enc_x.shape}")
    if enc_fx.ndim == 1:
        enc_fx, g_enc_x = enc_fx[None], g_enc_x[None]
    n = enc_fx.shape[0]
    if n == 0:
        raise ShapeError("empty pair set")
    d = enc_fx - g_enc_x
    sq = (d * d).sum(axis=-1)          # (N, ...) summed over latent dims
    per_pair = sq.mean(axis=tuple(range(1, sq.ndim))) if sq.ndim > 1 else sq
    return float(lam / n * per_pair.sum())


def equivariance_grad(enc_fx, g_enc_x, lam=1.0):
    """(d/d enc_fx, d/d g_enc_x) of equivariance_value."""
    enc_fx, g_enc_x = np.asarray(enc_fx), np.asarray(g_enc_x)
    squeeze = enc_fx.ndim == 1
    if squeeze:
        enc_fx, g_enc_x = enc_fx[None], g_enc_x[None]
    n = enc_fx.shape[0]
    batch = int(np.prod(enc_fx.shape[1:-1])) or 1
    d = 2.0 * (enc_fx - g_enc_x) * (lam / (n * batch))
    if squeeze:
        d = d[0]
    return d, -d


def equivariance_loss(encode, xs, pairs, lam=1.0):
    """Spec-shaped wrapper: run the encoder mean head over each pair.

    ``encode``: callable mapping a batch of frames to latent means.
    ``xs``: [(x, f_x)] per pair — the original and transformed frames.
    ``pairs``: matching [TransformPair] supplying each g.
    """
    if len(pairs) == 0:
        raise ShapeError("empty pair set")
    if len(xs) != len(pairs):
        raise ShapeError("one (x, f(x)) tuple required per pair")
    enc_fx, g_enc_x = [], []
    for (x, fx), pair in zip(xs, pairs):
        enc_fx.append(encode(fx))
        g_enc_x.append(pair.g.apply(encode(x)))
    return equivariance_value(np.stack(enc_fx), np.stack(g_enc_x), lam)


# ---------------------------------------------------------------------------
# state supervision

def supervised_state_loss(z, labels_norm, dims):
    """MSE over the supervised dims of z against normalized labels.

    ``z``: (batch, latent); ``labels_norm``: (batch, state_dim) already in
    normalized units; ``dims``: indices into the state block. Empty dims
    (the unlabeled case) contribute exactly 0.
    """
    dims = tuple(dims)
    if not dims:
        return 0.0
    z, labels_norm = np.asarray(z), np.asarray(labels_norm)
    return mse(z[..., dims], labels_norm[..., dims])


def supervised_state_grad(z, labels_norm, dims):
    dims = tuple(dims)
    dz = np.zeros_like(np.asarray(z))
    if not dims:
        return dz
    z, labels_norm = np.asarray(z), np.asarray(labels_norm)
    dz[..., dims] = mse_grad(z[..., dims], labels_norm[..., dims])
    return dz


def smoothness_loss(p_seq):
    """Sum over t of ||p_t - 2 p_{t+1} + p_{t+2}||^2.

    ``p_seq``: (T, ...) with T >= 3; trailing dims are summed inside the norm.
    """
    p = np.asarray(p_seq, dtype=np.float64)
    if p.shape[0] < 3:
        raise ShapeError(f"need at least 3 steps, got {p.shape[0]}")
    d2 = p[:-2] - 2.0 * p[1:-1] + p[2:]
    return float((d2 * d2).sum())


def smoothness_grad(p_seq):
    p = np.asarray(p_seq, dtype=np.float64)
    if p.shape[0] < 3:
        raise ShapeError(f"need at least 3 steps, got {p.shape[0]}")
    d2 = 2.0 * (p[:-2] - 2.0 * p[1:-1] + p[2:])
    grad = np.zeros_like(p)
    grad[:-2] += d2
    grad[1:-1] -= 2.0 * d2
    grad[2:] += d2
    return grad


def interval_loss(p, a, b):
    """Mean-per-element squared hinge: max(0, a-p)^2 + max(0, p-b)^2."""
    p, a, b = np.asarray(p, dtype=np.float64), np.asarray(a), np.asarray(b)
    if np.any(a > b):
        raise ValueError("interval bounds must satisfy a <= b")
    lo = np.maximum(0.0, a - p)
    hi = np.maximum(0.0, p - b)
    return float(np.mean(lo * lo + hi * hi))


def interval_grad(p, a, b):
    p, a, b = np.asarray(p, dtype=np.float64), np.asarray(a), np.asarray(b)
    lo = np.maximum(0.0, a - p)
    hi = np.maximum(0.0, p - b)
    return (2.0 * hi - 2.0 * lo) / p.size


# ---------------------------------------------------------------------------
# generation

def partitioned_gen_loss(x, x_hat, parts, part_targets, lam=0.2):
    """Whole-image MSE plus lam times the sum of per-part MSEs.

    ``parts``: (n_parts, ...) predicted part images; ``part_targets``: the
    masked originals x * m_i, same shape. Per-part MSE divides by the full
    image size (mean-per-element), not by the mask area.
    """
    parts, targets = np.asarray(parts), np.asarray(part_targets)
    if parts.shape != targets.shape:
        raise ShapeError(f"parts {parts.shape} vs targets {targets.shape}")
    total = mse(x_hat, x)
    for p, t in zip(parts, targets):
        total += lam * mse(p, t)
    return float(total)


def partitioned_gen_grad(x, x_hat, parts, part_targets, lam=0.2):
    """(d/d x_hat, d/d parts)."""
    parts, targets = np.asarray(parts), np.asarray(part_targets)
    dx_hat = mse_grad(np.asarray(x_hat), np.asarray(x))
    dparts = np.stack([lam * mse_grad(p, t) for p, t in zip(parts, targets)])
    return dx_hat, dparts


def prediction_loss(pred_seq, target_seq):
    """Mean-per-element MSE over all steps and dims."""
    return mse(pred_seq, target_seq)


def prediction_grad(pred_seq, target_seq):
    return mse_grad(np.asarray(pred_seq), np.asarray(target_seq))


# ---------------------------------------------------------------------------
# registry

@dataclass(frozen=True)
class LossTerm:
    name: str
    weight: float
    fn: object  # callable(ctx: dict) -> float

    def __post_init__(self):
        if self.weight < 0:
            raise ValueError(f"negative weight for {self.name}")


class LossRegistry:
    """Named weighted terms; total = sum of weight * term."""

    def __init__(self, terms=()):
        self.terms = list(terms)
        names = [t.name for t in self.terms]
        if len(set(names)) != len(names):
            raise ValueError("duplicate loss term names")

    def add(self, name, weight, fn):
        self.terms.append(LossTerm(name, weight, fn))
        return self

    def evaluate(self, ctx):
        """Returns (total, {name: unweighted value})."""
        values = {t.name: float(t.fn(ctx)) for t in self.terms}
        total = sum(t.weight * values[t.name] for t in self.terms)
        return total, values
