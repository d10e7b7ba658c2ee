"""Step the two simulators, sanity-check the integrator, render a contact sheet.

Both environments use a semi-implicit Euler stepper with internal substeps;
here we compare a few steps against a high-resolution RK4 reference and save
a strip of rendered frames with their exact segment masks.

Run:  python demos/01_simulate_and_render.py
"""

from pathlib import Path

import numpy as np
from PIL import Image

from physwm.sim import (
    Action,
    PhysState,
    cartpole_energy,
    reference_step,
    render,
    step,
    terminal,
)

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

# --- 1. a cartpole trajectory under a constant push -------------------------
state = PhysState("cartpole", np.array([0.0, 0.0, 0.05, 0.0]))
push = Action("cartpole", 10.0)

print("cartpole under a constant 10 N push (x, x_dot, theta, theta_dot):")
for t in range(5):
    print(f"  t={t}: " + " ".join(f"{v:+.4f}" for v in state.values))
    state = step(state, push)

# --- 2. stepper vs an RK4 oracle -------------------------------------------
state = PhysState("cartpole", np.array([0.3, -0.2, 0.15, 0.1]))
ref = reference_step(state, push)
mine = step(state, push)
gap = np.max(np.abs(ref.values - mine.values))
print(f"\nmax |step - rk4 reference| after one dt: {gap:.2e}")

# Unforced cartpole conserves energy up to integrator error.
free = Action("cartpole", 0.0)
s = PhysState("cartpole", np.array([0.0, 0.5, 0.4, -0.3]))
e0 = cartpole_energy(s)
for _ in range(200):
    s = step(s, free)
print(f"energy drift over 200 free steps: {abs(cartpole_energy(s) - e0):.2e} J")

# --- 3. lander descent to the bottom of the flight envelope -----------------
s = PhysState("lander", np.array([0.0, 6.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0]))
burn = Action("lander", (0.38, 0.0))      # below the 0.405 hover ratio
steps = 0
while not terminal(s) and steps < 800:
    s = step(s, burn)
    steps += 1
print(f"\nlander left the valid flight box after {steps} steps "
      f"at y={s.values[1]:.3f} m, vy={s.values[3]:.3f} m/s")

# --- 4. contact sheet: frames + masks --------------------------------------
strip = []
state = PhysState("cartpole", np.array([-1.0, 1.2, 0.35, 0.0]))
for _ in range(6):
    obs = render(state, 64)
    frame = (obs.pixels * 255).astype(np.uint8)
    # stack the three masks as a gray strip under the frame
    mask_row = np.concatenate([m.astype(np.uint8) * 255 for m in obs.masks], axis=1)
    mask_row = np.repeat(mask_row[:, :, None], 3, axis=2)
    mask_row = np.asarray(Image.fromarray(mask_row).resize((64, 22)))
    strip.append(np.concatenate([frame, mask_row], axis=0))
    for _ in range(8):
        state = step(state, free)

sheet = np.concatenate(strip, axis=1)
path = OUT / "cartpole_contact_sheet.png"
Image.fromarray(sheet).save(path)
print(f"\nwrote {path} (frames with cart/pole/background masks below)")
