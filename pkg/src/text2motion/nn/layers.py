"""Transformer building blocks on top of the autodiff tensor core.

Layer order is post-norm (attention -> add&norm -> feed-forward -> add&norm)
with GELU activations. Padding is handled with an additive -1e9 bias on the
attention scores, which underflows to an exactly-zero attention weight after
softmax.
"""

from __future__ import annotations

import numpy as np

from . import tensor as T
from .tensor import Parameter, Tensor

MASK_BIAS = -1e9


class AttentionMask:
    """Boolean validity matrix [batch, length]; True marks a real position."""

    def __init__(self, valid):
        valid = np.asarray(valid, dtype=bool)
        if valid.ndim != 2:
            raise ValueError(f"mask must be [batch, length], got shape {valid.shape}")
        if not valid.any(axis=1).all():
            raise ValueError("mask has a row with no valid positions")
        self.valid = valid

    @classmethod
    def from_lengths(cls, lengths, max_len=None):
        lengths = np.asarray(lengths, dtype=int)
        if max_len is None:
            max_len = int(lengths.max())
        return cls(np.arange(max_len)[None, :] < lengths[:, None])

    @property
    def shape(self):
        return self.valid.shape

    def score_bias(self):
        """Additive bias [batch, 1, 1, length] for attention scores."""
        bias = np.where(self.valid, 0.0, MASK_BIAS)
        return bias[:, None, None, :]


class Module:
    """Minimal nn module: tracks parameters, submodules and train/eval mode."""

    def __init__(self):
        self.training = True

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def _children(self):
        for name, value in vars(self).items():
            if isinstance(value, Module):
                yield name, value
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield f"{name}.{i}", item

    def named_parameters(self, prefix=""):
        for name, value in vars(self).items():
            if isinstance(value, Parameter):
                yield prefix + name, value
        for name, child in self._children():
            yield from child.named_parameters(prefix=f"{prefix}{name}.")

    def parameters(self):
        for _, p in self.named_parameters():
            yield p

    def zero_grad(self):
        for p in self.parameters():
            p.zero_grad()

    def train(self):
        self.training = True
        for _, child in self._children():
            child.train()
        return self

    def eval(self):
        self.training = False
        for _, child in self._children():
            child.eval()
        return self


def xavier_uniform(rng, fan_in, fan_out, dtype=np.float32):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out)).astype(dtype)


class Linear(Module):
    def __init__(self, in_features, out_features, rng, bias=True, dtype=np.float32):
        super().__init__()
        self.weight = Parameter(xavier_uniform(rng, in_features, out_features, dtype))
        self.bias = Parameter(np.zeros(out_features, dtype=dtype)) if bias else None

    def forward(self, x):
        y = T.matmul(x, self.weight)
        if self.bias is not None:
            y = T.add(y, self.bias)
        return y


class LayerNorm(Module):
    def __init__(self, dim, eps=1e-5, dtype=np.float32):
        super().__init__()
        self.gain = Parameter(np.ones(dim, dtype=dtype))
        self.bias = Parameter(np.zeros(dim, dtype=dtype))
        self.eps = eps

    def forward(self, x):
        mu = T.mean(x, axis=-1, keepdims=True)
        centered = T.sub(x, mu)
        var = T.mean(T.square(centered), axis=-1, keepdims=True)
        normed = T.div(centered, T.sqrt(T.add(var, self.eps)))
        return T.add(T.mul(normed, self.gain), self.bias)


class Dropout(Module):
    """Inverted dropout; the generator comes from the run seed. Identity in eval mode."""

    def __init__(self, rate, rng):
        super().__init__()
        self.rate = rate
        self.rng = rng

    def forward(self, x):
        if not self.training or self.rate <= 0.0:
            return x
        keep = (self.rng.random(x.shape) >= self.rate).astype(x.dtype)
        scale = x.data.dtype.type(1.0 / (1.0 - self.rate))
        return T.mul(x, keep * scale)


def sinusoidal_positional_encoding(length, dim, dtype=np.float32):
    """Classic sin/cos position table [length, dim]; `dim` must be even."""
    if dim % 2 != 0:
        raise ValueError(f"positional encoding needs an even dim, got {dim}")
    pos = np.arange(length, dtype=np.float64)[:, None]
    freq = np.power(10000.0, -np.arange(0, dim, 2, dtype=np.float64) / dim)
    pe = np.empty((length, dim), dtype=np.float64)
    pe[:, 0::2] = np.sin(pos * freq)
    pe[:, 1::2] = np.cos(pos * freq)
    return pe.astype(dtype)


def _split_heads(x, n_heads):
    b, length, d = x.shape
    dh = d // n_heads
    return T.transpose(T.reshape(x, (b, length, n_heads, dh)), (0, 2, 1, 3))


def _merge_heads(x):
    b, h, length, dh = x.shape
    return T.reshape(T.transpose(x, (0, 2, 1, 3)), (b, length, h * dh))


class MultiHeadAttention(Module):
    """Scaled dot-product attention with a key-side padding mask."""

    def __init__(self, dim, n_heads, rng, dropout=0.0, dtype=np.float32):
        super().__init__()
        if dim % n_heads != 0:
            raise ValueError(f"model dim {dim} not divisible by {n_heads} heads")
        self.n_heads = n_heads
        self.scale = 1.0 / np.sqrt(dim // n_heads)
        self.wq = Linear(dim, dim, rng, dtype=dtype)
        self.wk = Linear(dim, dim, rng, dtype=dtype)
        self.wv = Linear(dim, dim, rng, dtype=dtype)
        self.wo = Linear(dim, dim, rng, dtype=dtype)
        self.dropout = Dropout(dropout, rng.spawn(1)[0])

    def forward(self, query, key, value, mask=None):
        if key.shape[1] != value.shape[1]:
            raise ValueError("key and value lengths differ")
        q = _split_heads(self.wq(query), self.n_heads)
        k = _split_heads(self.wk(key), self.n_heads)
        v = _split_heads(self.wv(value), self.n_heads)
        scores = T.mul(T.matmul(q, T.transpose(k, (0, 1, 3, 2))), self.scale)
        if mask is not None:
            if mask.shape != (key.shape[0], key.shape[1]):
                raise ValueError(f"mask shape {mask.shape} does not match keys {key.shape[:2]}")
            scores = T.add(scores, mask.score_bias().astype(scores.dtype))
        weights = self.dropout(T.softmax(scores, axis=-1))
        return self.wo(_merge_heads(T.matmul(weights, v)))


class FeedForward(Module):
    def __init__(self, dim, hidden_dim, rng, dropout=0.0, dtype=np.float32):
        super().__init__()
        self.lin1 = Linear(dim, hidden_dim, rng, dtype=dtype)
        self.lin2 = Linear(hidden_dim, dim, rng, dtype=dtype)
        self.dropout = Dropout(dropout, rng.spawn(1)[0])

    def forward(self, x):
        return self.lin2(self.dropout(T.gelu(self.lin1(x))))


class TransformerEncoderLayer(Module):
    def __init__(self, dim, n_heads, ff_dim, rng, dropout=0.0, dtype=np.float32):
        super().__init__()
        self.attn = MultiHeadAttention(dim, n_heads, rng, dropout, dtype)
        self.norm1 = LayerNorm(dim, dtype=dtype)
        self.ffn = FeedForward(dim, ff_dim, rng, dropout, dtype)
        self.norm2 = LayerNorm(dim, dtype=dtype)
        self.drop1 = Dropout(dropout, rng.spawn(1)[0])
        self.drop2 = Dropout(dropout, rng.spawn(1)[0])

    def forward(self, x, mask=None):
        x = self.norm1(T.add(x, self.drop1(self.attn(x, x, x, mask))))
        return self.norm2(T.add(x, self.drop2(self.ffn(x))))


class TransformerEncoder(Module):
    """Stack of self-attention layers; padded positions never reach valid ones."""

    def __init__(self, n_layers, dim, n_heads, ff_dim, rng, dropout=0.0, dtype=np.float32):
        super().__init__()
        self.layers = [
            TransformerEncoderLayer(dim, n_heads, ff_dim, rng, dropout, dtype)
            for _ in range(n_layers)
        ]

    def forward(self, x, mask=None):
        if mask is not None and mask.shape != x.shape[:2]:
            raise ValueError(f"mask shape {mask.shape} does not match input {x.shape[:2]}")
        for layer in self.layers:
            x = layer(x, mask)
        return x


class TransformerDecoderLayer(Module):
    """Full (non-causal) self-attention over queries plus cross-attention to memory."""

    def __init__(self, dim, n_heads, ff_dim, rng, dropout=0.0, dtype=np.float32):
        super().__init__()
        self.self_attn = MultiHeadAttention(dim, n_heads, rng, dropout, dtype)
        self.cross_attn = MultiHeadAttention(dim, n_heads, rng, dropout, dtype)
        self.norm1 = LayerNorm(dim, dtype=dtype)
        self.norm2 = LayerNorm(dim, dtype=dtype)
        self.norm3 = LayerNorm(dim, dtype=dtype)
        self.ffn = FeedForward(dim, ff_dim, rng, dropout, dtype)
        self.drop1 = Dropout(dropout, rng.spawn(1)[0])
        self.drop2 = Dropout(dropout, rng.spawn(1)[0])
        self.drop3 = Dropout(dropout, rng.spawn(1)[0])

    def forward(self, x, memory, query_mask=None, memory_mask=None):
        x = self.norm1(T.add(x, self.drop1(self.self_attn(x, x, x, query_mask))))
        x = self.norm2(T.add(x, self.drop2(self.cross_attn(x, memory, memory, memory_mask))))
        return self.norm3(T.add(x, self.drop3(self.ffn(x))))


class TransformerDecoder(Module):
    def __init__(self, n_layers, dim, n_heads, ff_dim, rng, dropout=0.0, dtype=np.float32):
        super().__init__()
        self.layers = [
            TransformerDecoderLayer(dim, n_heads, ff_dim, rng, dropout, dtype)
            for _ in range(n_layers)
        ]

    def forward(self, x, memory, query_mask=None, memory_mask=None):
        if x.shape[1] < 1:
            raise ValueError("decoder needs at least one query position")
        if memory.shape[1] < 1:
            raise ValueError("decoder memory must not be empty")
        for layer in self.layers:
            x = layer(x, memory, query_mask, memory_mask)
        return x
