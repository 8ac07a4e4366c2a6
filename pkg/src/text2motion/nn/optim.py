"""AdamW with decoupled weight decay and bias correction."""

from __future__ import annotations

import numpy as np


class NonFiniteGradient(ValueError):
    """Raised when a parameter's gradient contains NaN or inf."""


class AdamW:
    def __init__(self, named_params, lr=1e-4, betas=(0.9, 0.999), eps=1e-8, weight_decay=1e-2):
        self.named_params = list(named_params)
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.weight_decay = weight_decay
        self.step_count = 0
        self.m = {name: np.zeros_like(p.data) for name, p in self.named_params}
        self.v = {name: np.zeros_like(p.data) for name, p in self.named_params}

    def zero_grad(self):
        for _, p in self.named_params:
            p.zero_grad()

    def step(self):
        self.step_count += 1
        t = self.step_count
        bc1 = 1.0 - self.beta1 ** t
        bc2 = 1.0 - self.beta2 ** t
        for name, p in self.named_params:
            g = p.grad
            if g is None:
                continue
            if not np.isfinite(g).all():
                raise NonFiniteGradient(f"non-finite gradient for parameter '{name}'")
            m = self.m[name]
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            update = (m / bc1) / (np.sqrt(v / bc2) + self.eps)
            p.copy_(p.data - self.lr * (update + self.weight_decay * p.data))

    def state_dict(self):
        return {
            "step": self.step_count,
            "m": {k: v.copy() for k, v in self.m.items()},
            "v": {k: v.copy() for k, v in self.v.items()},
        }

    def load_state_dict(self, state):
        self.step_count = int(state["step"])
        for key, value in state["m"].items():
            self.m[key] = np.asarray(value, dtype=self.m[key].dtype).reshape(self.m[key].shape)
        for key, value in state["v"].items():
            self.v[key] = np.asarray(value, dtype=self.v[key].dtype).reshape(self.v[key].shape)
