"""Reverse-mode autodiff on numpy arrays.

A Tensor wraps an ndarray plus an optional backward closure. Ops build a
DAG; `backward()` on a scalar walks it in reverse topological order and
accumulates gradients into every tensor that has `requires_grad` set.
Training runs in float32; the gradient-check suite builds the same graphs
in float64.
"""

from __future__ import annotations

import numpy as np
from scipy.special import erf

DEFAULT_DTYPE = np.float32

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_INV_SQRT2PI = 1.0 / np.sqrt(2.0 * np.pi)


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad=False, dtype=None):
        if isinstance(data, Tensor):
            data = data.data
        arr = np.asarray(data, dtype=dtype)
        if not np.issubdtype(arr.dtype, np.floating):
            arr = arr.astype(DEFAULT_DTYPE)
        self.data = arr
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents = ()
        self._backward = None

    # -- construction -------------------------------------------------

    @staticmethod
    def _from_op(data, parents, backward):
        """Result node of an op; tracks grads only if some parent does."""
        out = Tensor(data)
        tracked = tuple(p for p in parents if p.requires_grad)
        if tracked:
            out.requires_grad = True
            out._parents = tuple(parents)
            out._backward = backward
        return out

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype}, requires_grad={self.requires_grad})"

    def detach(self):
        return Tensor(self.data)

    def copy_(self, values):
        """In-place overwrite of a leaf tensor (optimizer use only)."""
        self.data[...] = values

    def _accumulate(self, g):
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def zero_grad(self):
        self.grad = None

    # -- autodiff -----------------------------------------------------

    def backward(self):
        if self.data.size != 1:
            raise ValueError(f"backward() needs a scalar loss, got shape {self.data.shape}")
        order = _toposort(self)
        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._backward is not None:
                node._backward(node.grad)

    # -- operator sugar -----------------------------------------------

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(_as_tensor(other, self.dtype), self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(_as_tensor(other, self.dtype), self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(_as_tensor(other, self.dtype), self)

    def __truediv__(self, other):
        return div(self, other)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, key):
        return take_slice(self, key)

    def sum(self, axis=None, keepdims=False):
        return sum_(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        return reshape(self, shape if len(shape) > 1 else shape[0])

    def transpose(self, axes):
        return transpose(self, axes)


class Parameter(Tensor):
    """Trainable leaf tensor."""

    def __init__(self, data, dtype=None):
        super().__init__(data, requires_grad=True, dtype=dtype)


def _toposort(root):
    """Iterative DFS post-order; rejects cycles."""
    order = []
    done = set()
    on_stack = set()
    stack = [(root, iter(root._parents))]
    on_stack.add(id(root))
    while stack:
        node, parents = stack[-1]
        advanced = False
        for p in parents:
            pid = id(p)
            if pid in done:
                continue
            if pid in on_stack:
                raise ValueError("cycle detected in computation graph")
            if p._backward is not None or p.requires_grad:
                on_stack.add(pid)
                stack.append((p, iter(p._parents)))
                advanced = True
                break
            done.add(pid)
        if not advanced:
            stack.pop()
            on_stack.discard(id(node))
            done.add(id(node))
            order.append(node)
    return order


def _as_tensor(x, dtype=None):
    if isinstance(x, Tensor):
        return x
    return Tensor(np.asarray(x, dtype=dtype if dtype is not None else DEFAULT_DTYPE))


def _match(x, dtype):
    """Constant operand for a graph of `dtype`: explicit numpy float dtypes win,
    python scalars and integer arrays adopt the partner's dtype."""
    arr = np.asarray(x)
    if np.issubdtype(arr.dtype, np.floating) and not isinstance(x, (int, float)):
        return arr
    return arr.astype(dtype)


def _pair(a, b):
    """Coerce the operands of a binary op, preserving the graph dtype."""
    if isinstance(a, Tensor):
        return a, (b if isinstance(b, Tensor) else Tensor(_match(b, a.dtype)))
    if isinstance(b, Tensor):
        return Tensor(_match(a, b.dtype)), b
    return _as_tensor(a), _as_tensor(b)


def _unbroadcast(grad, shape):
    """Sum `grad` down to `shape` (reverses numpy broadcasting)."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


# -- elementwise arithmetic -------------------------------------------


def add(a, b):
    a, b = _pair(a, b)
    out_data = a.data + b.data

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g, a.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(g, b.shape))

    return Tensor._from_op(out_data, (a, b), backward)


def sub(a, b):
    a, b = _pair(a, b)
    out_data = a.data - b.data

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g, a.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(-g, b.shape))

    return Tensor._from_op(out_data, (a, b), backward)


def neg(a):
    a = _as_tensor(a)

    def backward(g):
        if a.requires_grad:
            a._accumulate(-g)

    return Tensor._from_op(-a.data, (a,), backward)


def mul(a, b):
    a, b = _pair(a, b)
    out_data = a.data * b.data

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g * b.data, a.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(g * a.data, b.shape))

    return Tensor._from_op(out_data, (a, b), backward)


def div(a, b):
    a, b = _pair(a, b)
    out_data = a.data / b.data

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g / b.data, a.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(-g * a.data / (b.data * b.data), b.shape))

    return Tensor._from_op(out_data, (a, b), backward)


def square(a):
    a = _as_tensor(a)

    def backward(g):
        if a.requires_grad:
            a._accumulate(g * (2.0 * a.data))

    return Tensor._from_op(a.data * a.data, (a,), backward)


def exp(a):
    a = _as_tensor(a)
    out_data = np.exp(a.data)

    def backward(g):
        if a.requires_grad:
            a._accumulate(g * out_data)

    return Tensor._from_op(out_data, (a,), backward)


def log(a):
    a = _as_tensor(a)

    def backward(g):
        if a.requires_grad:
            a._accumulate(g / a.data)

    return Tensor._from_op(np.log(a.data), (a,), backward)


def sqrt(a):
    a = _as_tensor(a)
    out_data = np.sqrt(a.data)

    def backward(g):
        if a.requires_grad:
            a._accumulate(g * (0.5 / out_data))

    return Tensor._from_op(out_data, (a,), backward)


def gelu(a):
    """Gaussian error linear unit, exact erf form."""
    a = _as_tensor(a)
    x = a.data
    cdf = 0.5 * (1.0 + erf(x * _INV_SQRT2))

    def backward(g):
        if a.requires_grad:
            pdf = _INV_SQRT2PI * np.exp(-0.5 * x * x)
            a._accumulate(g * (cdf + x * pdf))

    return Tensor._from_op(x * cdf, (a,), backward)


# -- reductions -------------------------------------------------------


def sum_(a, axis=None, keepdims=False):
    a = _as_tensor(a)
    out_data = a.data.sum(axis=axis, keepdims=keepdims)

    def backward(g):
        if not a.requires_grad:
            return
        if axis is None:
            a._accumulate(np.broadcast_to(g, a.shape).copy())
        else:
            gx = g if keepdims else np.expand_dims(g, axis)
            a._accumulate(np.broadcast_to(gx, a.shape).copy())

    return Tensor._from_op(out_data, (a,), backward)


def mean(a, axis=None, keepdims=False):
    a = _as_tensor(a)
    if axis is None:
        count = a.data.size
    elif isinstance(axis, tuple):
        count = int(np.prod([a.shape[i] for i in axis]))
    else:
        count = a.shape[axis]
    inv = a.data.dtype.type(1.0 / count)
    return mul(sum_(a, axis=axis, keepdims=keepdims), inv)


# -- shape manipulation -----------------------------------------------


def reshape(a, shape):
    a = _as_tensor(a)

    def backward(g):
        if a.requires_grad:
            a._accumulate(g.reshape(a.shape))

    return Tensor._from_op(a.data.reshape(shape), (a,), backward)


def transpose(a, axes):
    a = _as_tensor(a)
    inv = np.argsort(axes)

    def backward(g):
        if a.requires_grad:
            a._accumulate(g.transpose(inv))

    return Tensor._from_op(a.data.transpose(axes), (a,), backward)


def concat(tensors, axis=0):
    tensors = [_as_tensor(t) for t in tensors]
    sizes = [t.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def backward(g):
        for t, lo, hi in zip(tensors, offsets[:-1], offsets[1:]):
            if t.requires_grad:
                idx = [slice(None)] * g.ndim
                idx[axis] = slice(lo, hi)
                t._accumulate(g[tuple(idx)])

    return Tensor._from_op(
        np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors), backward
    )


def take_slice(a, key):
    """Basic slicing/indexing; gradient scatters back into place."""
    a = _as_tensor(a)

    def backward(g):
        if a.requires_grad:
            full = np.zeros_like(a.data)
            np.add.at(full, key, g)
            a._accumulate(full)

    return Tensor._from_op(a.data[key], (a,), backward)


def embedding(table, ids):
    """Row lookup `table[ids]`; grads scatter-add into the table."""
    table = _as_tensor(table)
    ids = np.asarray(ids)

    def backward(g):
        if table.requires_grad:
            full = np.zeros_like(table.data)
            np.add.at(full, ids, g)
            table._accumulate(full)

    return Tensor._from_op(table.data[ids], (table,), backward)


# -- linear algebra ---------------------------------------------------


def matmul(a, b):
    """Matrix product with numpy batch semantics."""
    a, b = _pair(a, b)
    out_data = a.data @ b.data

    def backward(g):
        if a.requires_grad:
            ga = g @ np.swapaxes(b.data, -1, -2)
            a._accumulate(_unbroadcast(ga, a.shape))
        if b.requires_grad:
            gb = np.swapaxes(a.data, -1, -2) @ g
            b._accumulate(_unbroadcast(gb, b.shape))

    return Tensor._from_op(out_data, (a, b), backward)


def softmax(a, axis=-1):
    """Numerically stable softmax along `axis`."""
    a = _as_tensor(a)
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out_data = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        if a.requires_grad:
            dot = (g * out_data).sum(axis=axis, keepdims=True)
            a._accumulate(out_data * (g - dot))

    return Tensor._from_op(out_data, (a,), backward)


def smooth_l1(pred, target):
    """Elementwise smooth L1 with unit transition point.

    0.5*d^2 for |d| < 1, |d| - 0.5 otherwise; C1 at the transition, so
    finite-difference checks hold everywhere.
    """
    pred, target = _pair(pred, target)
    d = pred.data - target.data
    absd = np.abs(d)
    out_data = np.where(absd < 1.0, 0.5 * d * d, absd - 0.5)

    def backward(g):
        gd = g * np.clip(d, -1.0, 1.0)
        if pred.requires_grad:
            pred._accumulate(_unbroadcast(gd, pred.shape))
        if target.requires_grad:
            target._accumulate(_unbroadcast(-gd, target.shape))

    return Tensor._from_op(out_data, (pred, target), backward)
