"""Finite-difference gradient verification.

Every differentiable op is checked in float64 against central differences
with h=1e-5. The same registry backs the unit tests and the `gradcheck`
CLI command.
"""

from __future__ import annotations

import numpy as np

from . import tensor as T
from .layers import (
    AttentionMask,
    LayerNorm,
    Linear,
    MultiHeadAttention,
    TransformerDecoder,
    TransformerEncoder,
)
from .tensor import Tensor

H = 1e-5
TOLERANCE = 1e-4


def numerical_gradient(fn, x, h=H):
    """Central differences of scalar-valued fn at ndarray x, elementwise."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        hi = fn(x)
        flat[i] = orig - h
        lo = fn(x)
        flat[i] = orig
        gflat[i] = (hi - lo) / (2.0 * h)
    return grad


def relative_error(analytic, numeric):
    """Max elementwise |a-n| / max(|a|, |n|, 1)."""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1.0)
    return float(np.max(np.abs(analytic - numeric) / denom))


def check_gradient(build_loss, inputs, h=H):
    """Compare autodiff grads of `build_loss(*tensors)` against central differences.

    `inputs` is a list of float64 ndarrays; each becomes a requires_grad leaf.
    Returns the worst relative error over all inputs.
    """
    tensors = [Tensor(np.asarray(x, dtype=np.float64), requires_grad=True) for x in inputs]
    loss = build_loss(*tensors)
    loss.backward()
    analytic = []
    for i, t in enumerate(tensors):
        assert t.grad is not None, f"input {i} received no gradient"
        analytic.append(t.grad.copy())
    worst = 0.0
    for i, t in enumerate(tensors):
        def scalar_fn(x, i=i):
            probe = [Tensor(v.data) for v in tensors]
            probe[i] = Tensor(x.copy())
            return float(build_loss(*probe).data)

        num = numerical_gradient(scalar_fn, t.data, h=h)
        worst = max(worst, relative_error(analytic[i], num))
    return worst


def _set_by_path(module, path, value):
    parts = path.split(".")
    target = module
    for part in parts[:-1]:
        target = target[int(part)] if part.isdigit() else getattr(target, part)
    setattr(target, parts[-1], value)


def check_module_gradient(module, extra_inputs, call, h=H):
    """Gradcheck all parameters of `module` together with extra array inputs.

    `call(module, extras)` must return a scalar Tensor. Parameters are swapped
    for probe tensors by attribute path so the graph reaches the probes.
    """
    items = list(module.named_parameters())
    names = [n for n, _ in items]
    inputs = [p.data.astype(np.float64) for _, p in items] + list(extra_inputs)

    def build_loss(*tensors):
        for name, t in zip(names, tensors):
            _set_by_path(module, name, t)
        return call(module, tensors[len(names):])

    return check_gradient(build_loss, inputs, h=h)


def _rng(seed):
    return np.random.default_rng(seed)


def _quadratic(x):
    # Smooth scalarizer so the loss depends nonlinearly on every output.
    return T.sum_(T.mul(x, x))


def _check_elementwise(seed):
    rng = _rng(seed)
    a = rng.normal(size=(3, 4))
    b = rng.normal(size=(3, 4)) + 2.5
    return check_gradient(lambda x, y: T.sum_(T.add(T.mul(x, y), T.div(x, y))), [a, b])


def _check_exp_log_sqrt(seed):
    rng = _rng(seed)
    a = rng.uniform(0.5, 2.0, size=(4, 3))
    return check_gradient(lambda x: T.sum_(T.add(T.exp(x), T.add(T.log(x), T.sqrt(x)))), [a])


def _check_matmul(seed):
    rng = _rng(seed)
    a = rng.normal(size=(2, 3, 4))
    b = rng.normal(size=(4, 5))
    return check_gradient(lambda x, y: _quadratic(T.matmul(x, y)), [a, b])


def _check_softmax(seed):
    rng = _rng(seed)
    a = rng.normal(size=(3, 5))
    return check_gradient(lambda x: _quadratic(T.softmax(x, axis=-1)), [a])


def _check_gelu(seed):
    rng = _rng(seed)
    a = rng.normal(size=(4, 4))
    return check_gradient(lambda x: T.sum_(T.gelu(x)), [a])


def _check_smooth_l1(seed):
    rng = _rng(seed)
    a = rng.normal(size=(3, 4)) * 2.0
    b = rng.normal(size=(3, 4)) * 2.0
    return check_gradient(lambda x, y: T.sum_(T.smooth_l1(x, y)), [a, b])


def _check_reductions(seed):
    rng = _rng(seed)
    a = rng.normal(size=(3, 4, 2))

    def loss(x):
        m = T.mean(x, axis=1)
        s = T.sum_(x, axis=(0, 2), keepdims=True)
        return T.add(_quadratic(m), _quadratic(s))

    return check_gradient(loss, [a])


def _check_shape_ops(seed):
    rng = _rng(seed)
    a = rng.normal(size=(2, 3, 4))
    b = rng.normal(size=(2, 3, 4))

    def loss(x, y):
        cat = T.concat([x, y], axis=1)
        flat = T.reshape(T.transpose(cat, (0, 2, 1)), (2, -1))
        return _quadratic(flat[:, 1:-1])

    return check_gradient(loss, [a, b])


def _check_embedding(seed):
    rng = _rng(seed)
    table = rng.normal(size=(7, 4))
    ids = np.array([[0, 3, 3], [6, 1, 0]])
    return check_gradient(lambda t: _quadratic(T.embedding(t, ids)), [table])


def _check_linear(seed):
    rng = _rng(seed)
    layer = Linear(4, 3, rng, dtype=np.float64)
    x = rng.normal(size=(2, 5, 4))
    return check_module_gradient(layer, [x], lambda mod, extras: _quadratic(mod(extras[0])))


def _check_layer_norm(seed):
    rng = _rng(seed)
    ln = LayerNorm(6, dtype=np.float64)
    ln.gain.data[...] = rng.normal(size=6)
    ln.bias.data[...] = rng.normal(size=6) * 0.1
    x = rng.normal(size=(2, 3, 6)) * 2.0
    return check_module_gradient(ln, [x], lambda mod, extras: _quadratic(mod(extras[0])))


def _check_attention(seed):
    rng = _rng(seed)
    mha = MultiHeadAttention(8, 2, rng, dropout=0.0, dtype=np.float64)
    mha.eval()
    x = rng.normal(size=(2, 4, 8))
    mask = AttentionMask(np.array([[True, True, True, False], [True, True, False, False]]))
    return check_module_gradient(
        mha, [x], lambda mod, extras: _quadratic(mod(extras[0], extras[0], extras[0], mask))
    )


def _check_encoder_stack(seed):
    rng = _rng(seed)
    enc = TransformerEncoder(1, 8, 2, 8, rng, dropout=0.0, dtype=np.float64)
    enc.eval()
    x = rng.normal(size=(2, 3, 8))
    mask = AttentionMask(np.array([[True, True, True], [True, True, False]]))
    return check_module_gradient(
        enc, [x], lambda mod, extras: _quadratic(mod(extras[0], mask))
    )


def _check_decoder_stack(seed):
    rng = _rng(seed)
    dec = TransformerDecoder(1, 8, 2, 8, rng, dropout=0.0, dtype=np.float64)
    dec.eval()
    q = rng.normal(size=(2, 3, 8))
    mem = rng.normal(size=(2, 1, 8))
    return check_module_gradient(
        dec, [q, mem], lambda mod, extras: _quadratic(mod(extras[0], extras[1]))
    )


def _check_total_loss(seed):
    from ..model import loss_gradcheck_case

    return loss_gradcheck_case(seed)


OP_CHECKS = {
    "elementwise_arith": _check_elementwise,
    "exp_log_sqrt": _check_exp_log_sqrt,
    "matmul": _check_matmul,
    "softmax": _check_softmax,
    "gelu": _check_gelu,
    "smooth_l1": _check_smooth_l1,
    "reductions": _check_reductions,
    "shape_ops": _check_shape_ops,
    "embedding": _check_embedding,
    "linear": _check_linear,
    "layer_norm": _check_layer_norm,
    "multi_head_attention": _check_attention,
    "transformer_encoder": _check_encoder_stack,
    "transformer_decoder": _check_decoder_stack,
    "total_loss": _check_total_loss,
}


def run_op_checks(seed=0, tolerance=TOLERANCE, ops=None):
    """Run registered op checks; returns [(name, max_rel_err, passed)]."""
    results = []
    for name, fn in OP_CHECKS.items():
        if ops is not None and name not in ops:
            continue
        err = fn(seed)
        results.append((name, err, err < tolerance))
    return results
