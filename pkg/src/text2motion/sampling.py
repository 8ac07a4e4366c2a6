"""Text -> motion generation from a trained model."""

from __future__ import annotations

import numpy as np

from .model import TextMotionModel
from .motion.types import FeatureSequence
from .nn.layers import AttentionMask
from .nn.tensor import Tensor


def latent_for_text(model, vocab, text, rng=None, z_zero=False, k=1):
    """Encode one description and draw k latent vectors ([k, d] ndarray)."""
    sample = vocab.encode(text)
    ids = sample.token_ids[None, :]
    mask = AttentionMask(np.ones((1, sample.length), dtype=bool))
    dist = model.encode_text(ids, mask)
    d = model.config.latent_dim
    if model.config.deterministic:
        return np.repeat(dist.mu.data, k, axis=0)
    if z_zero:
        return np.zeros((k, d), dtype=model.dtype)
    if rng is None:
        raise ValueError("sampling random latents needs an rng")
    mu = dist.mu.data[0]
    std = np.exp(dist.log_std.data[0])
    eps = rng.standard_normal((k, d)).astype(model.dtype)
    return mu[None, :] + std[None, :] * eps


def decode_features(model, z, duration) -> list[np.ndarray]:
    """Decode a [k, d] latent batch into k standardized feature matrices."""
    model.eval()
    out = model.decode(Tensor(np.asarray(z, dtype=model.dtype)), duration)
    return [out.data[i] for i in range(out.shape[0])]


def generate_motions(model, vocab, standardizer, codec, text, duration, k=1, rng=None, z_zero=False):
    """Full pipeline: text -> latents -> features -> destandardize -> decode."""
    if duration < 1:
        raise ValueError("duration must be at least one frame")
    model.eval()
    z = latent_for_text(model, vocab, text, rng=rng, z_zero=z_zero, k=k)
    motions = []
    for feats in decode_features(model, z, duration):
        seq = FeatureSequence(feats.astype(np.float64), standardized=True)
        motions.append(codec.inverse_transform(standardizer.inverse_transform(seq)))
    return motions
