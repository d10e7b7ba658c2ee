"""Parameter accounting."""

from __future__ import annotations


def count_params(model):
    """Exact count of trainable scalars."""
    return sum(p.value.size for p in model.parameters())


def param_table(model):
    """[(name, shape, count)] per parameter, in registration order."""
    return [(p.name, tuple(p.value.shape), p.value.size) for p in model.parameters()]
