"""Latent-space layout: which dimensions carry the physical state."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ShapeError
from ..sim import constants as C


@dataclass(frozen=True)
class LatentLayout:
    """A 64-dim latent whose leading block is the normalized physical state.

    ``supervised_dims`` may be a subset of the state block (static-only
    supervision leaves velocity slots in place but untrained), so the state
    block layout never depends on the supervision mode.
    """

    env_id: str
    latent_dim: int = 64

    def __post_init__(self):
        if self.latent_dim < C.STATE_DIMS[self.env_id]:
            raise ShapeError(
                f"latent_dim {self.latent_dim} cannot hold the "
                f"{C.STATE_DIMS[self.env_id]}-dim state block")

    @property
    def state_dim(self):
        return C.STATE_DIMS[self.env_id]

    @property
    def free_dim(self):
        return self.latent_dim - self.state_dim

    @property
    def state_slice(self):
        return slice(0, self.state_dim)

    @property
    def free_slice(self):
        return slice(self.state_dim, self.latent_dim)

    def read_state(self, z):
        """Normalized state read off a latent batch (..., latent_dim)."""
        return z[..., self.state_slice]

    @property
    def static_dims(self):
        return C.STATIC_DIMS[self.env_id]

    @property
    def velocity_dims(self):
        return tuple(sorted(C.VELOCITY_OF[self.env_id].values()))
