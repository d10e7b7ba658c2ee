"""Run directories: the on-disk contract between train, evaluate, and report.

Layout under the output root (default ``runs/``, overridable via the
PHYSWM_OUT_ROOT environment variable):

    runs/<env>_<arm>_s<seed>_<hash>/
        config.json           effective config that produced everything below
        history.jsonl         autoencoder or decoder training curve
        pred_history.jsonl    predictor curve (trend arms only)
        vae.npz + vae.json    weights + metadata (trend arms)
        predictor.npz/.json
        model.npz/.json       (generative-decoder arms)
        done.json             written last; presence marks a complete run
        eval/                 everything `evaluate` derives from the above

Re-running `train` on a complete run dir is a no-op; `evaluate` overwrites
its own outputs byte-identically for unchanged inputs.
"""

from __future__ import annotations

import json
import os
import time
from pathlib import Path

import numpy as np

from .. import bench
from ..data import generate
from ..models import (
    VAE,
    LatentLayout,
    LatentPredictor,
    PartitionedDecoderSet,
    TinyAutoencoder,
    count_params,
    load_weights,
    save_checkpoint,
)
from ..errors import DatasetError
from ..losses import LatentShift
from ..sim import constants as C
from ..sim import transforms as T
from ..sim.types import PhysState
from .config import config_from_json
from .trainer import (
    split_episodes,
    train_autoencoder,
    train_partitioned,
    train_predictor,
)

OUT_ROOT_VAR = "PHYSWM_OUT_ROOT"


def out_root(override=None):
    return Path(override or os.environ.get(OUT_ROOT_VAR, "runs"))


def build_dataset(config):
    """Regenerate the run's dataset; deterministic in the config alone."""
    return generate(config.env_id, policy=config.policy,
                    n_episodes=config.n_episodes, episode_len=config.episode_len,
                    seed=config.data_seed, resolution=config.resolution)


def run_dir_for(config, root=None):
    return out_root(root) / config.run_name()


def is_complete(run_dir):
    return (Path(run_dir) / "done.json").exists()


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def train_run(config, root=None, dataset=None):
    """Train one arm end to end and persist every artifact; returns run dir."""
    run_dir = run_dir_for(config, root)
    if is_complete(run_dir):
        return run_dir
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "config.json").write_text(config.to_json() + "\n")
    if dataset is None:
        dataset = build_dataset(config)
    t0 = time.perf_counter()
    artifacts = ["config.json", "history.jsonl"]
    if config.arm in ("p4_partitioned", "p4_baseline"):
        model, history = train_partitioned(config, dataset)
        history.save(run_dir / "history.jsonl")
        kind = "partitioned_set" if config.arm == "p4_partitioned" else "tiny_autoencoder"
        save_checkpoint(run_dir / "model.npz", model, kind,
                        _p4_build_args(config), config.hash())
        artifacts += ["model.npz", "model.json"]
    else:
        vae, history = train_autoencoder(config, dataset)
        history.save(run_dir / "history.jsonl")
        save_checkpoint(run_dir / "vae.npz", vae, "vae",
                        {"env_id": config.env_id, "latent_dim": config.latent_dim,
                         "resolution": config.resolution,
                         "structured": config.structured}, config.hash())
        predictor, pred_history = train_predictor(config, vae, dataset)
        pred_history.save(run_dir / "pred_history.jsonl")
        save_checkpoint(run_dir / "predictor.npz", predictor, "predictor",
                        {"latent_dim": config.latent_dim}, config.hash())
        artifacts += ["vae.npz", "vae.json", "pred_history.jsonl",
                      "predictor.npz", "predictor.json"]
    _write_json(run_dir / "done.json",
                {"elapsed_seconds": time.perf_counter() - t0,
                 "artifacts": sorted(artifacts)})
    return run_dir


def _p4_build_args(config):
    args = {"env_id": config.env_id, "resolution": config.resolution}
    if config.arm == "p4_partitioned":
        args["seed_side"] = config.resolution // (2 if config.env_id == C.CARTPOLE else 4)
    return args


def load_config(run_dir):
    path = Path(run_dir) / "config.json"
    if not path.exists():
        raise DatasetError(f"no config.json under {run_dir}")
    return config_from_json(path.read_text())


def load_run(run_dir):
    """Rebuild the trained models of a completed run; returns (config, models)."""
    run_dir = Path(run_dir)
    config = load_config(run_dir)
    if not is_complete(run_dir):
        raise DatasetError(f"run {run_dir} is incomplete (no done.json)")
    rng = np.random.default_rng(0)      # shapes only; weights overwritten
    models = {}
    if config.arm in ("p4_partitioned", "p4_baseline"):
        args = _p4_build_args(config)
        if config.arm == "p4_partitioned":
            model = PartitionedDecoderSet(args["env_id"], args["resolution"], rng,
                                          seed_side=args["seed_side"])
        else:
            model = TinyAutoencoder(args["env_id"], args["resolution"], rng)
        load_weights(run_dir / "model.npz", model)
        models["model"] = model
    else:
        layout = LatentLayout(config.env_id, config.latent_dim)
        vae = VAE.build(layout, config.resolution, rng, structured=config.structured)
        load_weights(run_dir / "vae.npz", vae)
        predictor = LatentPredictor(config.latent_dim, rng)
        load_weights(run_dir / "predictor.npz", predictor)
        models["vae"] = vae
        models["predictor"] = predictor
    return config, models


def _audit_pairs(config, episodes, n_pairs=24):
    """True-g transform pairs plus matched identity pairs on val states."""
    rng = np.random.default_rng(config.seed + 7)
    kinds = T.kinds_for(config.env_id)
    pairs, states = [], []
    flat_states = [PhysState(ep.env_id, ep.states[t])
                   for ep in episodes for t in range(0, len(ep), 7)]
    for i in range(n_pairs):
        state = flat_states[int(rng.integers(len(flat_states)))]
        if i % 3 == 2:
            pairs.append(bench.AuditPair(f"identity_{i}", None, LatentShift()))
        else:
            kind = kinds[i % len(kinds)]
            tr = T.sample_transform(state, kind, rng)
            g = LatentShift((tr.dim,), (T.normalized_shift(tr),))
            pairs.append(bench.AuditPair(f"{kind}_{i}", tr, g))
        states.append(state)
    return pairs, states


def evaluate_run(run_dir, root=None):
    """Derive eval artifacts from a completed run; returns the eval dir."""
    run_dir = Path(run_dir)
    config, models = load_run(run_dir)
    dataset = build_dataset(config)
    _, val = split_episodes(dataset, config.val_fraction)
    eval_dir = run_dir / "eval"
    eval_dir.mkdir(exist_ok=True)

    if config.arm in ("p4_partitioned", "p4_baseline"):
        _write_json(eval_dir / "gen_metrics.json",
                    gen_metrics(config, models["model"], val.episodes))
    else:
        layout = LatentLayout(config.env_id, config.latent_dim)
        report = bench.horizon_state_mse(
            models["vae"], models["predictor"], layout, val.episodes,
            config.horizons, config.context, variant=config.arm)
        _write_json(eval_dir / "horizon.json", report.as_dict())
        pairs, states = _audit_pairs(config, val.episodes)
        verdicts = bench.alignment_audit(models["vae"], pairs, states,
                                         resolution=config.resolution)
        counts = {label: 0 for label in bench.CLASSES}
        for v in verdicts:
            counts[v.label] += 1
        _write_json(eval_dir / "alignment.json",
                    {"counts": counts, "verdicts": [v.as_dict() for v in verdicts]})
    return eval_dir


def verify_run(run_dir, baseline_run=None, n_boxes=3, radius=0.05, samples=2000):
    """Interval-bound demo on a trained partitioned run; returns the report.

    Boxes are radius-balls (in normalized state units) around states drawn
    from the run's validation episodes. Writes eval/verify.json.
    """
    run_dir = Path(run_dir)
    config, models = load_run(run_dir)
    if config.arm != "p4_partitioned":
        raise DatasetError(f"verify needs a p4_partitioned run, got {config.arm}")
    dataset = build_dataset(config)
    _, val = split_episodes(dataset, config.val_fraction)
    states = np.concatenate([ep.states_norm() for ep in val.episodes])
    rng = np.random.default_rng(config.seed + 11)
    centers = states[rng.choice(states.shape[0], size=n_boxes, replace=False)]
    boxes = [bench.BoundBox(c - radius, c + radius) for c in centers]

    model = models["model"]
    parts = dict(zip(C.SEGMENT_NAMES[config.env_id], model.decoders))
    mono = None
    if baseline_run is not None:
        base_cfg, base_models = load_run(baseline_run)
        if base_cfg.arm != "p4_baseline" or base_cfg.env_id != config.env_id:
            raise DatasetError("baseline run must be p4_baseline on the same env")
        mono = base_models["model"].decoder
    rows = bench.verification_scaling_report(parts, mono, boxes)

    violations = {}
    for name, dec in parts.items():
        violations[name] = sum(
            bench.mc_containment(dec, box, n_samples=samples,
                                 rng=np.random.default_rng(config.seed + 13))
            for box in boxes)
    report = {"rows": rows, "mc_violations": violations,
              "n_boxes": n_boxes, "radius": radius, "samples_per_box": samples}
    eval_dir = run_dir / "eval"
    eval_dir.mkdir(exist_ok=True)
    _write_json(eval_dir / "verify.json", report)
    return report


def gen_metrics(config, model, episodes):
    """Reconstruction MSE/SSIM and size for one generative-decoder run."""
    frames = np.concatenate([ep.frames_f32() for ep in episodes])
    partitioned = config.arm == "p4_partitioned"
    if partitioned:
        states = np.concatenate(
            [ep.states_norm() for ep in episodes]).astype(np.float32)
        (parts, recon), _ = model.forward(states)
        masks = np.concatenate([ep.masks for ep in episodes])
        out_frac = bench.out_of_mask_energy(parts, masks)
        extra = {
            "out_of_mask_energy": [float(v) for v in out_frac],
            "per_part_params": [count_params(d) for d in model.decoders],
        }
    else:
        recon, _ = model.forward(frames)
        extra = {}
    mse = float(np.mean((recon - frames) ** 2))
    ssim_vals = [bench.ssim(recon[i], frames[i])
                 for i in range(0, frames.shape[0], max(1, frames.shape[0] // 40))]
    return {
        "arm": config.arm,
        "env_id": config.env_id,
        "avg_mse": mse,
        "avg_ssim": float(np.mean(ssim_vals)),
        "model_size": count_params(model),
        "p4_lambda": config.p4_lambda,
        **extra,
    }
