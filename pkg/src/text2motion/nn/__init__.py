from .tensor import Parameter, Tensor
from .layers import (
    AttentionMask,
    Dropout,
    FeedForward,
    LayerNorm,
    Linear,
    Module,
    MultiHeadAttention,
    TransformerDecoder,
    TransformerEncoder,
    sinusoidal_positional_encoding,
)
from .optim import AdamW, NonFiniteGradient

__all__ = [
    "AdamW",
    "AttentionMask",
    "Dropout",
    "FeedForward",
    "LayerNorm",
    "Linear",
    "Module",
    "MultiHeadAttention",
    "NonFiniteGradient",
    "Parameter",
    "Tensor",
    "TransformerDecoder",
    "TransformerEncoder",
    "sinusoidal_positional_encoding",
]
