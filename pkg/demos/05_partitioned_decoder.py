"""Train the partitioned generative decoder and inspect its composition.

One small decoder per scene segment (cart, pole, background), each fed the
normalized physical state and supervised on its own masked image; the full
frame is their pixelwise maximum. Compared against a monolithic tiny
autoencoder at the same training budget.

Run:  python demos/05_partitioned_decoder.py
"""

from pathlib import Path

import numpy as np
from PIL import Image

from physwm.bench import out_of_mask_energy, ssim
from physwm.engine import config_for_arm, runner, train_partitioned
from physwm.engine.trainer import split_episodes
from physwm.models import count_params
from physwm.sim import SEGMENT_NAMES

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

BUDGET = dict(n_episodes=10, episode_len=30, epochs=10, resolution=32,
              val_fraction=0.2)

cfg = config_for_arm("cartpole", "p4_partitioned", **BUDGET)
ds = runner.build_dataset(cfg)
model, _ = train_partitioned(cfg, ds)

base_cfg = config_for_arm("cartpole", "p4_baseline", **BUDGET)
mono, _ = train_partitioned(base_cfg, ds)

# --- parameter budgets ------------------------------------------------------
print("parameter budgets:")
for name, dec in zip(SEGMENT_NAMES["cartpole"], model.decoders):
    print(f"  part decoder {name:12s} {count_params(dec):8,}")
print(f"  partitioned total       {count_params(model):8,}")
print(f"  monolithic autoencoder  {count_params(mono):8,}")
ratio = count_params(model) / count_params(mono)
print(f"  ratio                   {ratio:8.3f}")

# --- reconstruction quality on held-out frames ------------------------------
_, val = split_episodes(ds, cfg.val_fraction)
frames = np.concatenate([ep.frames_f32() for ep in val.episodes])
states = np.concatenate([ep.states_norm() for ep in val.episodes]).astype(np.float32)
masks = np.concatenate([ep.masks for ep in val.episodes])

(parts, composed), _ = model.forward(states)
recon_mono, _ = mono.forward(frames)

mse_p = float(np.mean((composed - frames) ** 2))
mse_m = float(np.mean((recon_mono - frames) ** 2))
ssim_p = float(np.mean([ssim(composed[i], frames[i]) for i in range(0, len(frames), 10)]))
ssim_m = float(np.mean([ssim(recon_mono[i], frames[i]) for i in range(0, len(frames), 10)]))
print(f"\nheld-out reconstruction: partitioned mse {mse_p:.5f} ssim {ssim_p:.4f}")
print(f"                         monolithic  mse {mse_m:.5f} ssim {ssim_m:.4f}")

# --- does each part stay inside its segment? --------------------------------
energy = out_of_mask_energy(parts, masks)
print("\nfraction of part energy outside its own segment mask:")
for name, frac in zip(SEGMENT_NAMES["cartpole"], energy):
    print(f"  {name:12s} {frac:.4f}")

# --- visual: truth / parts / composition ------------------------------------
i = 0
tiles = [frames[i]] + [parts[p, i] for p in range(3)] + [composed[i]]
sheet = np.concatenate([(t.transpose(1, 2, 0) * 255).astype(np.uint8)
                        for t in tiles], axis=1)
path = OUT / "partitioned_composition.png"
Image.fromarray(sheet).save(path)
print(f"\nwrote {path} (truth | three parts | composed)")
