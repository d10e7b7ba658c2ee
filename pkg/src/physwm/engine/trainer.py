"""Training loops: variational autoencoder, latent predictor, generative decoders.

All loops share the same discipline: every random draw (init, shuffles,
posterior noise, pair sampling) comes from generators spawned off the config
seed, so a rerun of the same config is bit-identical on one platform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import losses as L
from ..data.annotate import annotate, attach_pseudo_velocity
from ..data import types as dtypes
from ..errors import ConfigError, ShapeError
from ..models import (
    VAE,
    LatentLayout,
    LatentPredictor,
    PartitionedDecoderSet,
    TinyAutoencoder,
)
from ..nn import Adam
from ..sim import constants as C
from ..sim import transforms as T
from ..sim.render import render
from ..sim.types import PhysState
from .records import History
from .schedule import lr_at


def _rngs(seed, n):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def label_dataset(dataset, config):
    """Attach the labels the configured arm trains on."""
    mode = config.supervision
    if mode == "FULL":
        return annotate(dataset, dtypes.SupervisionSpec(dtypes.FULL), seed=config.seed)
    if mode == "STATIC_ONLY":
        return annotate(dataset, dtypes.SupervisionSpec(dtypes.STATIC_ONLY),
                        seed=config.seed)
    if mode == "PSEUDO_VELOCITY":
        return attach_pseudo_velocity(dataset, seed=config.seed)
    raise ConfigError(f"unknown supervision mode {mode!r}")


@dataclass
class FlatData:
    """Episode-major flattened training arrays."""

    frames: np.ndarray       # (N, 3, H, W) float32
    states: np.ndarray       # (N, state_dim) float64, raw units
    labels_norm: np.ndarray  # (N, state_dim) float32, zeros where unlabeled
    label_mask: np.ndarray   # (N, state_dim) bool
    bounds_lo: np.ndarray | None = None   # (N, state_dim) float32, INTERVAL only
    bounds_hi: np.ndarray | None = None

    def __len__(self):
        return self.frames.shape[0]


def flatten(dataset):
    """Flatten a labeled dataset for the autoencoder loop."""
    env = dataset.env_id
    sd = C.STATE_DIMS[env]
    center, scale = C.state_center(env), C.state_scales(env)
    frames, states = [], []
    labels = np.zeros((dataset.n_frames(), sd), dtype=np.float32)
    mask = np.zeros((dataset.n_frames(), sd), dtype=bool)
    lo = np.zeros_like(labels)
    hi = np.zeros_like(labels)
    any_interval = False
    row = 0
    for ep in dataset.episodes:
        frames.append(ep.frames_f32())
        states.append(ep.states)
        t_len = len(ep)
        lab = ep.labels
        if lab is not None and lab.level != dtypes.NONE:
            dims = list(lab.supervised_dims)
            if lab.values is not None:
                norm = (lab.values - center[dims]) / scale[dims]
                labels[row:row + t_len, dims] = norm.astype(np.float32)
                mask[row:row + t_len, dims] = True
            elif lab.interval_bounds:
                any_interval = True
                for d, (a, b) in lab.interval_bounds.items():
                    lo[row:row + t_len, d] = (a - center[d]) / scale[d]
                    hi[row:row + t_len, d] = (b - center[d]) / scale[d]
                    mask[row:row + t_len, d] = True
        row += t_len
    return FlatData(
        frames=np.concatenate(frames),
        states=np.concatenate(states),
        labels_norm=labels,
        label_mask=mask,
        bounds_lo=lo if any_interval else None,
        bounds_hi=hi if any_interval else None,
    )


def split_episodes(dataset, val_fraction):
    """Deterministic by-episode split: the trailing fraction validates."""
    n = len(dataset.episodes)
    n_val = int(round(val_fraction * n))
    if val_fraction > 0 and n_val == 0:
        n_val = 1
    if n_val >= n:
        raise ConfigError("validation split leaves no training episodes")
    from dataclasses import replace
    train = replace(dataset, episodes=dataset.episodes[:n - n_val])
    val = replace(dataset, episodes=dataset.episodes[n - n_val:])
    return train, val


def masked_state_loss(mu_state, labels_norm, mask):
    """Mean squared error over the labeled entries only."""
    count = int(mask.sum())
    if count == 0:
        return 0.0, np.zeros_like(mu_state)
    d = (mu_state - labels_norm) * mask
    loss = float((d * d).sum() / count)
    return loss, 2.0 * d / count


def interval_state_loss(mu_state, lo, hi, mask, size_norm):
    """Squared hinge on labeled entries, normalized like a mean."""
    below = np.maximum(0.0, lo - mu_state) * mask
    above = np.maximum(0.0, mu_state - hi) * mask
    loss = float((below * below + above * above).sum() / size_norm)
    grad = (2.0 * above - 2.0 * below) / size_norm
    return loss, grad


class _EqPairSampler:
    """Draws transform pairs for a batch and renders the transformed frames."""

    def __init__(self, env_id, resolution, pairs_per_batch, rng):
        self.env_id = env_id
        self.resolution = resolution
        self.n_pairs = pairs_per_batch
        self.kinds = T.kinds_for(env_id)
        self.rng = rng
        self._kind_pos = 0

    def draw(self, batch_states_raw):
        batch = batch_states_raw.shape[0]
        n = min(self.n_pairs, batch)
        sel = self.rng.choice(batch, size=n, replace=False)
        frames = np.empty((n, 3, self.resolution, self.resolution), dtype=np.float32)
        offsets = np.zeros((n,), dtype=np.float32)
        dims = np.zeros((n,), dtype=np.int64)
        for j, idx in enumerate(sel):
            kind = self.kinds[self._kind_pos % len(self.kinds)]
            self._kind_pos += 1
            state = PhysState(self.env_id, batch_states_raw[idx])
            tr = T.sample_transform(state, kind, self.rng)
            moved = T.apply_transform(state, tr)
            obs = render(moved, self.resolution)
            frames[j] = obs.pixels.transpose(2, 0, 1)
            offsets[j] = T.normalized_shift(tr)
            dims[j] = tr.dim
        return sel, frames, dims, offsets


def _epoch_batches(n, batch_size, rng):
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]


def train_autoencoder(config, dataset):
    """Train the configured VAE arm; returns (vae, history).

    ``dataset`` is the raw (unlabeled) dataset; labels are attached here
    according to the arm. Divergence raises TrainingDivergedError.
    """
    rng_init, rng_train, rng_pairs = _rngs(config.seed, 3)
    labeled = label_dataset(dataset, config)
    train_ds, val_ds = split_episodes(labeled, config.val_fraction)
    tr, va = flatten(train_ds), flatten(val_ds)
    layout = LatentLayout(config.env_id, config.latent_dim)
    vae = VAE.build(layout, config.resolution, rng_init, structured=config.structured)
    opt = Adam(vae.parameters(), lr=config.lr)
    history = History()
    sd = layout.state_dim
    use_eq = config.arm == "p2_equivariant"
    sampler = _EqPairSampler(config.env_id, config.resolution,
                             config.eq_pairs_per_batch, rng_pairs) if use_eq else None

    for epoch in range(config.epochs):
        opt.lr = lr_at(config.lr, config.lr_decay, epoch)
        sums = {"recon": 0.0, "kl": 0.0, "sup": 0.0, "eq": 0.0, "interval": 0.0,
                "total": 0.0}
        n_batches = 0
        for idx in _epoch_batches(len(tr), config.batch_size, rng_train):
            x = tr.frames[idx]
            (x_hat, mu, logvar, _), cache = vae.forward(x, rng_train)

            recon = L.mse(x_hat, x)
            dx_hat = L.mse_grad(x_hat, x)
            kl = L.kl_to_unit(mu, logvar)
            dmu_kl, dlv_kl = L.kl_to_unit_grad(mu, logvar)
            dmu = config.beta * dmu_kl
            dlv = config.beta * dlv_kl

            sup, dsup = masked_state_loss(mu[:, :sd], tr.labels_norm[idx],
                                          tr.label_mask[idx])
            dmu[:, :sd] += config.sup_weight * dsup

            ival = 0.0
            if tr.bounds_lo is not None:
                ival, dival = interval_state_loss(
                    mu[:, :sd], tr.bounds_lo[idx], tr.bounds_hi[idx],
                    tr.label_mask[idx], mu[:, :sd].size)
                dmu[:, :sd] += config.interval_weight * dival

            eq = 0.0
            if use_eq:
                sel, fx_frames, dims, offsets = sampler.draw(tr.states[idx])
                (mu_fx, _), fx_cache = vae.encoder.forward(fx_frames)
                g_enc = mu[sel].copy()
                g_enc[np.arange(len(sel)), dims] += offsets
                eq = L.equivariance_value(mu_fx, g_enc, config.eq_lambda)
                d_fx, d_g = L.equivariance_grad(mu_fx, g_enc, config.eq_lambda)
                vae.encoder.backward(fx_cache, (d_fx, np.zeros_like(d_fx)))
                dmu[sel] += d_g

            total = (recon + config.beta * kl + config.sup_weight * sup
                     + config.interval_weight * ival + eq)
            vae.backward(cache, (dx_hat, dmu, dlv, None))
            opt.step()
            opt.zero_grad()

            for key, val in (("recon", recon), ("kl", kl), ("sup", sup),
                             ("eq", eq), ("interval", ival), ("total", total)):
                sums[key] += val
            n_batches += 1

        row = history.log(epoch, "train",
                          **{k: v / n_batches for k, v in sums.items()},
                          lr=opt.lr)
        history.check_finite(row)

        val_row = _validate_autoencoder(vae, va, config, sd, history, epoch)
        history.check_finite(val_row)
    return vae, history


def _validate_autoencoder(vae, va, config, sd, history, epoch):
    recon_sum, kl_sum, sup_sum, n = 0.0, 0.0, 0.0, 0
    for start in range(0, len(va), config.batch_size):
        x = va.frames[start:start + config.batch_size]
        (mu, logvar), _ = vae.encoder.forward(x)
        x_hat, _ = vae.decoder.forward(mu)
        recon_sum += L.mse(x_hat, x)
        kl_sum += L.kl_to_unit(mu, logvar)
        sup, _ = masked_state_loss(mu[:, :sd], va.labels_norm[start:start + config.batch_size],
                                   va.label_mask[start:start + config.batch_size])
        sup_sum += sup
        n += 1
    return history.log(epoch, "val", recon=recon_sum / n, kl=kl_sum / n,
                       sup=sup_sum / n,
                       total=(recon_sum + config.beta * kl_sum
                              + config.sup_weight * sup_sum) / n)


def encode_sequences(vae, dataset, batch_size=256):
    """Posterior means per episode: (n_episodes, T, latent) float32.

    Episodes must share one length (scripted datasets do).
    """
    lengths = {len(ep) for ep in dataset.episodes}
    if len(lengths) != 1:
        raise ShapeError(f"episodes must share one length, got {sorted(lengths)}")
    t_len = lengths.pop()
    out = []
    for ep in dataset.episodes:
        frames = ep.frames_f32()
        mus = []
        for start in range(0, t_len, batch_size):
            mus.append(vae.encode_mu(frames[start:start + batch_size]))
        out.append(np.concatenate(mus))
    return np.stack(out)


def train_predictor(config, vae, dataset):
    """Teacher-forced LSTM on frozen posterior-mean sequences."""
    (rng_init,) = _rngs(config.seed + 1_000_000, 1)
    train_ds, _ = split_episodes(dataset, config.val_fraction)
    z = encode_sequences(vae, train_ds)                  # (E, T, L)
    seq = z.transpose(1, 0, 2)                           # (T, E, L)
    inputs, targets = seq[:-1], seq[1:]
    predictor = LatentPredictor(config.latent_dim, rng_init)
    opt = Adam(predictor.parameters(), lr=config.pred_lr)
    history = History()
    sd = LatentLayout(config.env_id, config.latent_dim).state_dim
    smooth_norm = inputs.shape[1] * sd           # per-sequence, per-dim scale
    for epoch in range(config.pred_epochs):
        opt.lr = lr_at(config.pred_lr, config.lr_decay, epoch)
        pred, cache = predictor.forward(inputs)
        loss = L.prediction_loss(pred, targets)
        dpred = L.prediction_grad(pred, targets)
        smooth = 0.0
        if config.smooth_weight > 0.0:
            smooth = L.smoothness_loss(pred[:, :, :sd]) / smooth_norm
            dpred[:, :, :sd] += (config.smooth_weight / smooth_norm
                                 * L.smoothness_grad(pred[:, :, :sd]))
        predictor.backward(cache, dpred)
        opt.step()
        opt.zero_grad()
        row = history.log(epoch, "train", pred=loss, smooth=smooth,
                          total=loss + config.smooth_weight * smooth, lr=opt.lr)
        history.check_finite(row)
    return predictor, history


def train_partitioned(config, dataset):
    """Train the generative decoder arm (partitioned set or tiny baseline)."""
    rng_init, rng_train = _rngs(config.seed + 2_000_000, 2)
    train_ds, _ = split_episodes(dataset, config.val_fraction)
    frames = np.concatenate([ep.frames_f32() for ep in train_ds.episodes])
    masks = np.concatenate([ep.masks for ep in train_ds.episodes])
    states_norm = np.concatenate(
        [ep.states_norm() for ep in train_ds.episodes]).astype(np.float32)
    history = History()
    partitioned = config.arm == "p4_partitioned"
    if partitioned:
        seed_side = config.resolution // (2 if config.env_id == C.CARTPOLE else 4)
        model = PartitionedDecoderSet(config.env_id, config.resolution, rng_init,
                                      seed_side=seed_side)
    else:
        model = TinyAutoencoder(config.env_id, config.resolution, rng_init)
    opt = Adam(model.parameters(), lr=config.lr)
    for epoch in range(config.epochs):
        opt.lr = lr_at(config.lr, config.lr_decay, epoch)
        sums = {"whole": 0.0, "parts": 0.0, "total": 0.0}
        n_batches = 0
        for idx in _epoch_batches(frames.shape[0], config.batch_size, rng_train):
            x = frames[idx]
            if partitioned:
                z = states_norm[idx]
                (parts, composed), cache = model.forward(z)
                targets = x[None] * masks[idx].transpose(1, 0, 2, 3)[:, :, None]
                whole = L.mse(composed, x)
                part_terms = sum(L.mse(p, t) for p, t in zip(parts, targets))
                total = whole + config.p4_lambda * part_terms
                dcomposed = L.mse_grad(composed, x)
                dparts = np.stack([config.p4_lambda * L.mse_grad(p, t)
                                   for p, t in zip(parts, targets)])
                model.backward(cache, (dparts, dcomposed))
                sums["whole"] += whole
                sums["parts"] += part_terms
            else:
                x_hat, cache = model.forward(x)
                total = L.mse(x_hat, x)
                model.backward(cache, L.mse_grad(x_hat, x))
                sums["whole"] += total
            opt.step()
            opt.zero_grad()
            sums["total"] += total
            n_batches += 1
        row = history.log(epoch, "train",
                          **{k: v / n_batches for k, v in sums.items()},
                          lr=opt.lr)
        history.check_finite(row)
    return model, history
