"""Minimal numpy neural-network core.

Layers follow a functional contract: ``forward(x) -> (y, cache)`` and
``backward(cache, dy) -> dx`` with parameter gradients accumulated into
``Parameter.grad``. Caches are plain values handed back to the caller, so one
set of weights can run several concurrent forward passes (needed when a loss
compares two encodings of a transformed pair).

Everything runs in the dtype the parameters were created with: float32 for
training, float64 when tests do finite-difference checks.
"""

from .adam import Adam
from .init import uniform_fan_in
from .layers import (
    Conv2d,
    ConvTranspose2d,
    Flatten,
    Layer,
    Linear,
    Parameter,
    ReLU,
    Reshape,
    Sequential,
    Sigmoid,
)
from .lstm import LSTM

__all__ = [
    "Parameter", "Layer", "Linear", "Conv2d", "ConvTranspose2d",
    "ReLU", "Sigmoid", "Flatten", "Reshape", "Sequential", "LSTM",
    "Adam", "uniform_fan_in",
]
