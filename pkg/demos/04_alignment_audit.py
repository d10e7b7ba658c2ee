"""Audit how a trained encoder responds to physical scene transforms.

For each audit pair (f, g) we render a state x and its transformed version
f(x), then compare enc(f(x)) against g(enc(x)) where g is the latent-space
shift that a physically aligned code would perform. Each pair lands in one
of four classes:

    aligned-invariant       identity transforms leave the code in place
    aligned-equivariant     the code moves exactly as g claims
    misaligned-invariant    the code should have moved but did not
    misaligned-equivariant  the code moved, but not as claimed

An encoder trained with the equivariance penalty is compared against the
unpenalized baseline on the same pairs.

Run:  python demos/04_alignment_audit.py
"""

import numpy as np

from physwm.bench import CLASSES, AuditPair, alignment_audit
from physwm.engine import config_for_arm, runner, train_autoencoder
from physwm.losses import LatentShift
from physwm.sim import PhysState
from physwm.sim import transforms as T

BUDGET = dict(n_episodes=14, episode_len=40, epochs=8, val_fraction=0.25)

# Audit pairs: true transforms with their exact latent shifts, plus
# identity pairs that an aligned code must leave untouched.
rng = np.random.default_rng(0)
pairs, states = [], []
for i in range(30):
    state = PhysState("cartpole", np.array([
        rng.uniform(-1.2, 1.2), rng.uniform(-0.5, 0.5),
        rng.uniform(-0.25, 0.25), rng.uniform(-0.5, 0.5)]))
    if i % 3 == 2:
        pairs.append(AuditPair(f"identity_{i}", None, LatentShift()))
    else:
        kind = T.kinds_for("cartpole")[i % 2]
        tr = T.sample_transform(state, kind, rng)
        g = LatentShift((tr.dim,), (T.normalized_shift(tr),))
        pairs.append(AuditPair(f"{kind}_{i}", tr, g))
    states.append(state)

for arm in ("baseline", "p2_equivariant"):
    cfg = config_for_arm("cartpole", arm, seed=0, **BUDGET)
    vae, _ = train_autoencoder(cfg, runner.build_dataset(cfg))
    verdicts = alignment_audit(vae, pairs, states, resolution=cfg.resolution)
    counts = {label: 0 for label in CLASSES}
    for v in verdicts:
        counts[v.label] += 1
    print(f"\n{arm}:")
    for label in CLASSES:
        print(f"  {label:24s} {counts[label]:3d}")
    aligned = counts["aligned-invariant"] + counts["aligned-equivariant"]
    print(f"  aligned total            {aligned:3d} / {len(pairs)}")
