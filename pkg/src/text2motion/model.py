"""The cross-modal motion/text generative model.

Three networks share one latent space: a motion encoder and a text encoder
map a sequence to Gaussian parameters via learnable distribution tokens,
and a motion decoder expands a single latent vector non-autoregressively
into a feature sequence of any requested duration, using sinusoidal
positional encodings as queries.

The deterministic variant uses one embedding token per encoder and reads
the latent directly from its output, making the forward pass RNG-free.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .nn import tensor as T
from .nn.layers import (
    AttentionMask,
    Linear,
    Module,
    TransformerDecoder,
    TransformerEncoder,
    sinusoidal_positional_encoding,
)
from .nn.tensor import Parameter, Tensor


@dataclass
class ModelConfig:
    feature_dim: int
    vocab_size: int
    latent_dim: int = 256
    layers: int = 6
    heads: int = 4
    ff_dim: int = 1024
    dropout: float = 0.1
    deterministic: bool = False


class LatentDistribution:
    """Gaussian latent parameters for one batch: mu and log-std, each [B, d].

    The deterministic variant carries only a point embedding (log_std None).
    """

    def __init__(self, mu, log_std=None):
        self.mu = mu
        self.log_std = log_std

    @property
    def is_point(self):
        return self.log_std is None

    def sample(self, rng):
        """Reparameterized draw: mu + exp(log_std) * eps, differentiable in both."""
        if self.is_point:
            raise ValueError("point embedding has nothing to sample")
        eps = rng.standard_normal(self.mu.shape).astype(self.mu.dtype)
        return reparameterize(self, eps)


def reparameterize(dist, eps):
    """z = mu + exp(log_std) * eps for a fixed noise array."""
    if dist.is_point:
        raise ValueError("point embedding has nothing to sample")
    return T.add(dist.mu, T.mul(T.exp(dist.log_std), Tensor(eps)))


def _extend_mask(mask, n_tokens):
    lead = np.ones((mask.valid.shape[0], n_tokens), dtype=bool)
    return AttentionMask(np.concatenate([lead, mask.valid], axis=1))


class SequenceEncoder(Module):
    """Shared encoder body: prepend distribution tokens, add position codes, read them back."""

    def __init__(self, config, rng, dtype):
        super().__init__()
        d = config.latent_dim
        self.n_tokens = 1 if config.deterministic else 2
        self.tokens = Parameter((rng.normal(0.0, 0.02, size=(self.n_tokens, d))).astype(dtype))
        self.stack = TransformerEncoder(
            config.layers, d, config.heads, config.ff_dim, rng, config.dropout, dtype
        )
        self.dtype = dtype

    def encode(self, embedded, mask):
        b, length, d = embedded.shape
        pe = sinusoidal_positional_encoding(length, d, self.dtype)
        x = T.add(embedded, Tensor(pe))
        tokens = T.reshape(self.tokens, (1, self.n_tokens, d))
        tokens = T.add(tokens, Tensor(np.zeros((b, 1, 1), dtype=self.dtype)))  # tile over batch
        x = T.concat([tokens, x], axis=1)
        out = self.stack(x, _extend_mask(mask, self.n_tokens))
        if self.n_tokens == 1:
            return LatentDistribution(out[:, 0, :])
        return LatentDistribution(out[:, 0, :], out[:, 1, :])


class MotionEncoder(SequenceEncoder):
    def __init__(self, config, rng, dtype=np.float32):
        super().__init__(config, rng, dtype)
        self.in_proj = Linear(config.feature_dim, config.latent_dim, rng, dtype=dtype)
        self.feature_dim = config.feature_dim

    def forward(self, features, mask):
        features = features if isinstance(features, Tensor) else Tensor(features.astype(self.dtype))
        if features.shape[-1] != self.feature_dim:
            raise ValueError(
                f"feature dim {features.shape[-1]} does not match configured {self.feature_dim}"
            )
        return self.encode(self.in_proj(features), mask)


class TextEncoder(SequenceEncoder):
    def __init__(self, config, rng, dtype=np.float32):
        super().__init__(config, rng, dtype)
        self.embedding = Parameter(
            (rng.normal(0.0, 0.02, size=(config.vocab_size, config.latent_dim))).astype(dtype)
        )

    def forward(self, token_ids, mask):
        return self.encode(T.embedding(self.embedding, np.asarray(token_ids)), mask)


class MotionDecoder(Module):
    """Latent vector + duration -> feature sequence, all frames in one pass."""

    def __init__(self, config, rng, dtype=np.float32):
        super().__init__()
        self.stack = TransformerDecoder(
            config.layers, config.latent_dim, config.heads, config.ff_dim, rng, config.dropout, dtype
        )
        self.out_proj = Linear(config.latent_dim, config.feature_dim, rng, dtype=dtype)
        self.latent_dim = config.latent_dim
        self.dtype = dtype

    def forward(self, z, duration, query_mask=None):
        if duration < 1:
            raise ValueError("duration must be at least one frame")
        b = z.shape[0]
        pe = sinusoidal_positional_encoding(duration, self.latent_dim, self.dtype)
        queries = Tensor(np.broadcast_to(pe, (b, duration, self.latent_dim)).copy())
        memory = T.reshape(z, (b, 1, self.latent_dim))
        return self.out_proj(self.stack(queries, memory, query_mask, None))


class TextMotionModel(Module):
    """Bundle of the two encoders and the shared decoder."""

    def __init__(self, config: ModelConfig, seed=0, dtype=np.float32):
        super().__init__()
        self.config = config
        rng = np.random.default_rng([int(seed), 0x7E05])
        self.motion_encoder = MotionEncoder(config, rng, dtype)
        self.text_encoder = TextEncoder(config, rng, dtype)
        self.decoder = MotionDecoder(config, rng, dtype)
        self.dtype = dtype

    def encode_motion(self, features, mask) -> LatentDistribution:
        return self.motion_encoder(features, mask)

    def encode_text(self, token_ids, mask) -> LatentDistribution:
        return self.text_encoder(token_ids, mask)

    def decode(self, z, duration, query_mask=None) -> Tensor:
        return self.decoder(z, duration, query_mask)

    def latent_from_dist(self, dist, rng=None, eps=None):
        """Resolve a latent per model kind: point embedding, fixed eps, or rng draw."""
        if self.config.deterministic:
            return dist.mu
        if eps is not None:
            return reparameterize(dist, np.asarray(eps, dtype=self.dtype))
        if rng is None:
            raise ValueError("variational model needs an rng (or explicit eps) to sample")
        return dist.sample(rng)


def loss_gradcheck_case(seed):
    """Finite-difference check of the full two-branch loss w.r.t. every parameter."""
    from .losses import LossConfig, total_loss
    from .nn.gradcheck import check_module_gradient

    rng = np.random.default_rng(seed)
    config = ModelConfig(
        feature_dim=3, vocab_size=5, latent_dim=4, layers=1, heads=2, ff_dim=4, dropout=0.0
    )
    model = TextMotionModel(config, seed=seed, dtype=np.float64)
    model.eval()

    b, frames, words = 2, 3, 3
    feats = rng.normal(size=(b, frames, config.feature_dim))
    ids = rng.integers(0, config.vocab_size, size=(b, words))
    motion_mask = AttentionMask(np.array([[True] * frames, [True, True, False]]))
    text_mask = AttentionMask(np.array([[True, True, False], [True] * words]))
    eps_t = rng.normal(size=(b, config.latent_dim))
    eps_m = rng.normal(size=(b, config.latent_dim))
    cfg = LossConfig(lambda_kl=1e-2, lambda_e=1e-2)

    def call(mod, extras):
        target = extras[0]
        dist_m = mod.encode_motion(target, motion_mask)
        dist_t = mod.encode_text(ids, text_mask)
        z_m = reparameterize(dist_m, eps_m)
        z_t = reparameterize(dist_t, eps_t)
        recon_m = mod.decode(z_m, frames, motion_mask)
        recon_t = mod.decode(z_t, frames, motion_mask)
        loss, _ = total_loss(target, recon_m, recon_t, dist_t, dist_m, z_t, z_m, motion_mask, cfg)
        return loss

    return check_module_gradient(model, [feats], call)
