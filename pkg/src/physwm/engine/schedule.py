"""Learning-rate schedule: exponential decay per epoch."""

from __future__ import annotations


def lr_at(base_lr, decay, epoch):
    """base_lr * decay^epoch; decay in (0, 1]."""
    if not 0.0 < decay <= 1.0:
        raise ValueError(f"decay must be in (0, 1], got {decay}")
    return base_lr * decay ** epoch
