"""Model family: VAE encoders/decoders, latent predictor, partitioned decoders."""

from .checkpoint import CHECKPOINT_VERSION, load_weights, save_checkpoint
from .decoder import ConvDecoder
from .encoder import ConvEncoder, StructuredEncoder
from .layout import LatentLayout
from .params import count_params, param_table
from .partitioned import PartDecoder, PartitionedDecoderSet, TinyAutoencoder
from .predictor import LatentPredictor
from .vae import VAE, reparameterize, reparameterize_backward

__all__ = [
    "LatentLayout", "ConvEncoder", "StructuredEncoder", "ConvDecoder",
    "VAE", "reparameterize", "reparameterize_backward", "LatentPredictor",
    "PartDecoder", "PartitionedDecoderSet", "TinyAutoencoder",
    "count_params", "param_table",
    "save_checkpoint", "load_weights", "CHECKPOINT_VERSION",
]
