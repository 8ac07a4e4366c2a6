import numpy as np
import pytest

from text2motion.nn import tensor as T
from text2motion.nn.gradcheck import check_gradient, numerical_gradient, relative_error
from text2motion.nn.tensor import Parameter, Tensor


def test_grad_of_sum_of_squares():
    x = Tensor(np.array([1.0, 2.0, 3.0]), requires_grad=True)
    loss = T.sum_(T.mul(x, x))
    loss.backward()
    assert np.allclose(x.grad, [2.0, 4.0, 6.0])


def test_repeated_use_accumulates():
    x = Tensor(np.ones(4), requires_grad=True)
    loss = T.sum_(T.add(x, x))
    loss.backward()
    assert np.allclose(x.grad, 2.0 * np.ones(4))


def test_backward_rejects_non_scalar():
    x = Tensor(np.ones((2, 2)), requires_grad=True)
    y = T.mul(x, 2.0)
    with pytest.raises(ValueError, match="scalar"):
        y.backward()


def test_three_layer_mlp_matches_finite_differences():
    # random MLP wired from primitives, checked in 64-bit
    rng = np.random.default_rng(42)
    sizes = [(5, 7), (7, 4), (4, 1)]
    weights = [rng.normal(size=s) for s in sizes]
    biases = [rng.normal(size=s[1]) for s in sizes]
    x = rng.normal(size=(3, 5))

    def loss(*params):
        ws, bs = params[:3], params[3:6]
        h = Tensor(x)
        for w, b in zip(ws, bs):
            h = T.gelu(T.add(T.matmul(h, w), b))
        return T.sum_(T.mul(h, h))

    err = check_gradient(loss, weights + biases)
    assert err < 1e-4


def test_broadcast_gradients():
    a = np.random.default_rng(1).normal(size=(2, 3, 4))
    b = np.random.default_rng(2).normal(size=(4,))
    err = check_gradient(lambda x, y: T.sum_(T.mul(T.add(x, y), T.add(x, y))), [a, b])
    assert err < 1e-4


def test_softmax_rows_sum_to_one():
    rng = np.random.default_rng(3)
    x = Tensor(rng.normal(size=(5, 9)) * 10)
    s = T.softmax(x, axis=-1)
    assert np.allclose(s.data.sum(axis=-1), 1.0, atol=1e-6)


def test_dtype_preserved_float32():
    x = Tensor(np.ones((2, 2), dtype=np.float32), requires_grad=True)
    y = T.mul(T.add(x, 1.5), 0.5)
    assert y.dtype == np.float32
    T.sum_(y).backward()
    assert x.grad.dtype == np.float32


def test_cycle_detection():
    x = Tensor(np.ones(2), requires_grad=True)
    y = T.mul(x, 2.0)
    y._parents = (y,)  # forge a self-loop
    with pytest.raises(ValueError, match="cycle"):
        T.sum_(y).backward()


def test_grad_defined_for_all_reachable_params():
    a = Parameter(np.ones(3))
    b = Parameter(np.ones(3))
    loss = T.sum_(T.mul(a, b))
    loss.backward()
    assert a.grad is not None and b.grad is not None


def test_numerical_gradient_helper_quadratic():
    f = lambda v: float((v**2).sum())
    x = np.array([1.0, -2.0, 0.5])
    num = numerical_gradient(f, x)
    assert relative_error(2 * x, num) < 1e-8


def test_smooth_l1_values():
    pred = Tensor(np.array([0.0, 0.5, 2.0, -3.0]))
    target = Tensor(np.zeros(4))
    out = T.smooth_l1(pred, target)
    assert np.allclose(out.data, [0.0, 0.125, 1.5, 2.5])


def test_slice_and_concat_roundtrip_values():
    rng = np.random.default_rng(4)
    a = Tensor(rng.normal(size=(3, 4)))
    parts = T.concat([a[:, :2], a[:, 2:]], axis=1)
    assert np.array_equal(parts.data, a.data)


def test_embedding_lookup_and_grad():
    table = Parameter(np.arange(12, dtype=np.float64).reshape(4, 3))
    ids = np.array([0, 2, 2])
    out = T.embedding(table, ids)
    assert np.array_equal(out.data, table.data[ids])
    T.sum_(out).backward()
    # row 2 used twice -> gradient 2, row 0 once, others 0
    assert np.allclose(table.grad[:, 0], [1.0, 0.0, 2.0, 0.0])
