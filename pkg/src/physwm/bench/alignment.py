"""Four-way audit of how a representation responds to scene transforms.

Each pair supplies a state transform f and the latent map g claimed to
mirror it. Two residuals decide the verdict:

    r_align = ||enc(f(x)) - g(enc(x))||   (does the code move as claimed?)
    r_move  = ||enc(f(x)) - enc(x)||      (does the code move at all?)

aligned iff r_align <= tau_align; the invariant/equivariant flavor of an
aligned verdict follows from whether g is the identity. A misaligned code
is equivariant-flavored when it moved anyway (r_move > tau_move) and
invariant-flavored when it failed to move.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError
from ..sim.render import render
from ..sim.transforms import apply_transform

ALIGNED_INVARIANT = "aligned-invariant"
ALIGNED_EQUIVARIANT = "aligned-equivariant"
MISALIGNED_INVARIANT = "misaligned-invariant"
MISALIGNED_EQUIVARIANT = "misaligned-equivariant"
CLASSES = (ALIGNED_INVARIANT, ALIGNED_EQUIVARIANT,
           MISALIGNED_INVARIANT, MISALIGNED_EQUIVARIANT)

TAU_ALIGN = 0.1
TAU_MOVE = 0.1


@dataclass(frozen=True)
class AuditPair:
    """A transform f (None = identity) and its claimed latent map g."""

    pair_id: str
    f: object          # StateTransform or None
    g: object          # LatentShift


@dataclass(frozen=True)
class AlignmentVerdict:
    pair_id: str
    label: str
    residual_align: float
    residual_move: float

    def __post_init__(self):
        if self.label not in CLASSES:
            raise ShapeError(f"unknown class {self.label!r}")

    def as_dict(self):
        return {"pair_id": self.pair_id, "class": self.label,
                "residual_align": self.residual_align,
                "residual_move": self.residual_move}


def classify(residual_align, residual_move, g_is_identity,
             tau_align=TAU_ALIGN, tau_move=TAU_MOVE):
    if tau_align <= 0.0 or tau_move <= 0.0:
        raise ShapeError("thresholds must be positive")
    if residual_align <= tau_align:
        return ALIGNED_INVARIANT if g_is_identity else ALIGNED_EQUIVARIANT
    return MISALIGNED_EQUIVARIANT if residual_move > tau_move else MISALIGNED_INVARIANT


def alignment_audit(encoder, pairs, states, resolution=64,
                    tau_align=TAU_ALIGN, tau_move=TAU_MOVE):
    """Audit each (pair, state) couple; returns one verdict per couple."""
    if len(pairs) != len(states):
        raise ShapeError(f"{len(pairs)} pairs vs {len(states)} states")
    encode = encoder.encode_mu if hasattr(encoder, "encode_mu") else encoder
    verdicts = []
    for pair, state in zip(pairs, states):
        moved = state if pair.f is None else apply_transform(state, pair.f)
        frames = np.stack([
            render(state, resolution).pixels.transpose(2, 0, 1),
            render(moved, resolution).pixels.transpose(2, 0, 1),
        ])
        z = np.asarray(encode(frames), dtype=np.float64)
        enc_x, enc_fx = z[0], z[1]
        g_enc = pair.g.apply(enc_x[None])[0]
        r_align = float(np.linalg.norm(enc_fx - g_enc))
        r_move = float(np.linalg.norm(enc_fx - enc_x))
        verdicts.append(AlignmentVerdict(
            pair_id=pair.pair_id,
            label=classify(r_align, r_move, pair.g.is_identity, tau_align, tau_move),
            residual_align=r_align,
            residual_move=r_move,
        ))
    return verdicts
