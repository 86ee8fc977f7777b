import math

import numpy as np
import pytest

import gesturelab.ndiff as nd
from gesturelab.errors import NumericError, ParseError
from gesturelab.ndiff import AdamState, Tensor, adam_step, zero_grads
from gesturelab.ndiff.checkpoint import (
    apply_checkpoint,
    load_checkpoint,
    save_checkpoint,
)

FD_EPS = 1e-5
FD_TOL = 1e-4


def fd_check(build, tensors):
    """Compare backward() gradients against central finite differences.

    build must construct a fresh scalar loss from the live .data buffers
    of the given tensors every time it runs.
    """
    for t in tensors:
        t.grad = None
    nd.backward(build())
    for t in tensors:
        assert t.grad is not None, "missing gradient"
        grads = np.asarray(t.grad).reshape(-1)
        flat = t.data.reshape(-1)
        for i in range(flat.size):
            saved = flat[i]
            flat[i] = saved + FD_EPS
            up = build().item()
            flat[i] = saved - FD_EPS
            down = build().item()
            flat[i] = saved
            fd = (up - down) / (2.0 * FD_EPS)
            rel = abs(grads[i] - fd) / max(1e-6, abs(grads[i]) + abs(fd))
            assert rel < FD_TOL, f"element {i}: analytic {grads[i]}, fd {fd}"


def proj(shape, seed=99):
    return Tensor(np.random.default_rng(seed).normal(size=shape))


def scalarize(out):
    return nd.mean(nd.mul(out, proj(out.shape)))


def leaf(shape, seed, away_from_zero=False):
    rng = np.random.default_rng(seed)
    data = rng.normal(size=shape)
    if away_from_zero:
        data = np.sign(data) * (np.abs(data) + 0.2)
    return Tensor(data, requires_grad=True)


def test_add_sub_mul_with_broadcasting():
    a = leaf((4, 3), 0)
    b = leaf((4, 3), 1)
    bias = leaf((3,), 2)
    fd_check(lambda: scalarize(nd.add(a, b)), [a, b])
    fd_check(lambda: scalarize(nd.sub(a, b)), [a, b])
    fd_check(lambda: scalarize(nd.mul(a, b)), [a, b])
    fd_check(lambda: scalarize(nd.add(a, bias)), [a, bias])
    fd_check(lambda: scalarize(nd.mul(a, bias)), [a, bias])


def test_neg_and_scale():
    a = leaf((3, 2), 3)
    fd_check(lambda: scalarize(nd.neg(a)), [a])
    fd_check(lambda: scalarize(nd.scale(a, -2.5)), [a])
    np.testing.assert_allclose(nd.scale(a, 3.0).data, 3.0 * a.data)


def test_matmul_and_dense():
    x = leaf((4, 3), 4)
    w = leaf((3, 5), 5)
    b = leaf((5,), 6)
    fd_check(lambda: scalarize(nd.matmul(x, w)), [x, w])
    fd_check(lambda: scalarize(nd.dense(x, w, b)), [x, w, b])
    with pytest.raises(ValueError, match="2-D"):
        nd.matmul(Tensor(np.zeros(3)), w)


def test_activations():
    x = leaf((4, 3), 7, away_from_zero=True)
    fd_check(lambda: scalarize(nd.leaky_relu(x, 0.2)), [x])
    fd_check(lambda: scalarize(nd.sigmoid(x)), [x])
    fd_check(lambda: scalarize(nd.tanh(x)), [x])
    neg_side = Tensor([[-1.0, -2.0]], requires_grad=True)
    out = nd.leaky_relu(neg_side, 0.2)
    np.testing.assert_allclose(out.data, [[-0.2, -0.4]])


def test_log():
    x = Tensor(np.random.default_rng(8).uniform(0.5, 2.0, size=(3, 3)), requires_grad=True)
    fd_check(lambda: scalarize(nd.log(x)), [x])
    with pytest.raises(NumericError, match="non-positive"):
        nd.log(Tensor([0.0]))


def test_mean_full_and_axis0():
    x = leaf((5, 3), 9)
    fd_check(lambda: nd.mean(x), [x])
    fd_check(lambda: scalarize(nd.mean(x, axis=0)), [x])
    with pytest.raises(ValueError):
        nd.mean(x, axis=1)


def test_l1_loss():
    a = leaf((4, 3), 10)
    b = Tensor(a.data + np.sign(np.random.default_rng(11).normal(size=(4, 3))) * 0.5,
               requires_grad=True)
    fd_check(lambda: nd.l1_loss(a, b), [a, b])
    assert nd.l1_loss(a, a).item() == 0.0
    with pytest.raises(ValueError, match="shapes"):
        nd.l1_loss(a, Tensor(np.zeros((2, 2))))


def test_concat_both_axes():
    a = leaf((2, 3), 12)
    b = leaf((4, 3), 13)
    c = leaf((2, 5), 14)
    fd_check(lambda: scalarize(nd.concat([a, b], axis=0)), [a, b])
    fd_check(lambda: scalarize(nd.concat([a, c], axis=1)), [a, c])
    with pytest.raises(ValueError):
        nd.concat([])


def test_narrow_both_axes():
    x = leaf((5, 4), 15)
    fd_check(lambda: scalarize(nd.narrow(x, 0, 1, 4)), [x])
    fd_check(lambda: scalarize(nd.narrow(x, 1, 0, 2)), [x])
    with pytest.raises(ValueError, match="invalid"):
        nd.narrow(x, 0, 3, 2)
    with pytest.raises(ValueError, match="invalid"):
        nd.narrow(x, 0, 0, 9)


def test_reshape_and_tile_rows():
    x = leaf((2, 6), 16)
    row = leaf((1, 4), 17)
    fd_check(lambda: scalarize(nd.reshape(x, (3, 4))), [x])
    fd_check(lambda: scalarize(nd.tile_rows(row, 5)), [row])
    with pytest.raises(ValueError):
        nd.tile_rows(x, 3)


def test_embedding_accumulates_repeated_ids():
    table = leaf((5, 3), 18)
    ids = np.array([0, 2, 2, 4])
    fd_check(lambda: scalarize(nd.embedding(table, ids)), [table])
    table.grad = None
    out = nd.embedding(table, ids)
    nd.backward(nd.mean(out))
    # row 2 is hit twice, so its gradient doubles row 0's
    np.testing.assert_allclose(table.grad[2], 2.0 * table.grad[0])
    np.testing.assert_allclose(table.grad[1], 0.0)
    with pytest.raises(ValueError, match="out of range"):
        nd.embedding(table, np.array([5]))


def conv_naive(x, k, dilation):
    t_n, _ = x.shape
    c_out, _, width = k.shape
    center = width // 2
    y = np.zeros((t_n, c_out))
    for t in range(t_n):
        for j in range(width):
            src = t + (j - center) * dilation
            if 0 <= src < t_n:
                y[t] += k[:, :, j] @ x[src]
    return y


@pytest.mark.parametrize("dilation", [1, 2, 4])
def test_conv1d_matches_naive(dilation):
    x = leaf((6, 2), 19 + dilation)
    k = leaf((3, 2, 3), 30 + dilation)
    out = nd.conv1d_temporal(x, k, dilation)
    np.testing.assert_allclose(out.data, conv_naive(x.data, k.data, dilation), atol=1e-12)
    fd_check(lambda: scalarize(nd.conv1d_temporal(x, k, dilation)), [x, k])


def test_conv1d_shift_past_signal_end():
    # dilation 4 on a 3-frame signal pushes the outer taps entirely out
    x = leaf((3, 2), 40)
    k = leaf((2, 2, 3), 41)
    out = nd.conv1d_temporal(x, k, dilation=4)
    np.testing.assert_allclose(out.data, conv_naive(x.data, k.data, 4), atol=1e-12)
    # only the center tap can contribute
    np.testing.assert_allclose(out.data, x.data @ k.data[:, :, 1].T, atol=1e-12)
    fd_check(lambda: scalarize(nd.conv1d_temporal(x, k, 4)), [x, k])


def test_conv1d_validation():
    x = Tensor(np.zeros((4, 2)))
    with pytest.raises(ValueError, match="odd"):
        nd.conv1d_temporal(x, Tensor(np.zeros((2, 2, 4))))
    with pytest.raises(ValueError, match="input channels"):
        nd.conv1d_temporal(x, Tensor(np.zeros((2, 3, 3))))
    with pytest.raises(ValueError, match="dilation"):
        nd.conv1d_temporal(x, Tensor(np.zeros((2, 2, 3))), dilation=0)


def test_diamond_graph_accumulates():
    x = Tensor([2.0], requires_grad=True)
    y = nd.add(nd.scale(x, 2.0), nd.scale(x, 3.0))
    nd.backward(nd.mean(y))
    np.testing.assert_allclose(x.grad, [5.0])


def test_same_tensor_twice_in_one_op():
    x = Tensor([3.0], requires_grad=True)
    y = nd.mul(x, x)
    nd.backward(nd.mean(y))
    np.testing.assert_allclose(x.grad, [6.0])


def test_tape_is_topologically_ordered():
    x = Tensor(np.ones((2, 2)), requires_grad=True)
    a = nd.tanh(x)
    b = nd.sigmoid(x)
    out = nd.mean(nd.add(a, b))
    unused = nd.neg(a)  # reachable from a, but not from out
    tape = nd.trace(out)
    seqs = [n.output._seq for n in tape.nodes]
    assert seqs == sorted(seqs)
    assert unused.node not in tape.nodes
    for node in tape.nodes:
        for inp in node.inputs:
            assert inp._seq < node.output._seq


def test_detach_blocks_gradient():
    x = Tensor([1.5], requires_grad=True)
    through = nd.mean(nd.mul(x.detach(), Tensor([4.0])))
    nd.backward(through)
    assert x.grad is None
    assert not through.requires_grad or through.grad is not None


def test_backward_requires_scalar():
    x = Tensor(np.ones((2, 2)), requires_grad=True)
    with pytest.raises(ValueError, match="scalar"):
        nd.backward(nd.tanh(x))


def test_gradients_accumulate_across_backwards():
    x = Tensor([1.0], requires_grad=True)
    nd.backward(nd.mean(nd.scale(x, 2.0)))
    nd.backward(nd.mean(nd.scale(x, 3.0)))
    np.testing.assert_allclose(x.grad, [5.0])
    zero_grads({"x": x})
    assert x.grad is None


def test_adam_two_steps_hand_checked():
    w = Tensor(np.array([1.0]), requires_grad=True)
    state = AdamState(lr=0.1)
    lr, b1, b2, eps = 0.1, 0.9, 0.999, 1e-8

    adam_step({"w": w}, state, grads={"w": np.array([0.5])})
    m = (1 - b1) * 0.5
    v = (1 - b2) * 0.25
    expected = 1.0 - lr * (m / (1 - b1)) / (math.sqrt(v / (1 - b2)) + eps)
    assert w.data[0] == pytest.approx(expected, rel=1e-15)
    assert state.step == 1

    adam_step({"w": w}, state, grads={"w": np.array([-0.25])})
    m = b1 * m + (1 - b1) * -0.25
    v = b2 * v + (1 - b2) * 0.0625
    expected -= lr * (m / (1 - b1 ** 2)) / (math.sqrt(v / (1 - b2 ** 2)) + eps)
    assert w.data[0] == pytest.approx(expected, rel=1e-15)
    assert state.step == 2


def test_adam_missing_grad_keeps_parameter():
    w = Tensor(np.array([2.0]), requires_grad=True)
    state = AdamState(lr=0.1)
    adam_step({"w": w}, state)
    assert w.data[0] == 2.0
    assert state.step == 1


def test_adam_uses_accumulated_grads_by_default():
    w = Tensor(np.array([1.0]), requires_grad=True)
    nd.backward(nd.mean(nd.scale(w, 4.0)))
    state = AdamState(lr=0.01)
    adam_step({"w": w}, state)
    # sign of the step follows the gradient
    assert w.data[0] < 1.0


def test_checkpoint_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(42)
    params = {
        "a.weight": Tensor(rng.normal(size=(3, 4)), requires_grad=True),
        "a.bias": Tensor(rng.normal(size=4), requires_grad=True),
    }
    path = tmp_path / "ckpt.json"
    save_checkpoint(params, path, seed=7, extra={"note": "x"})
    arrays, seed = load_checkpoint(path)
    assert seed == 7
    fresh = {
        "a.weight": Tensor(np.zeros((3, 4)), requires_grad=True),
        "a.bias": Tensor(np.zeros(4), requires_grad=True),
    }
    apply_checkpoint(fresh, arrays)
    for name in params:
        np.testing.assert_array_equal(fresh[name].data, params[name].data)


def test_checkpoint_error_paths(tmp_path):
    params = {"w": Tensor(np.zeros(2), requires_grad=True)}
    path = tmp_path / "ckpt.json"
    save_checkpoint(params, path)
    arrays, _ = load_checkpoint(path)

    with pytest.raises(ParseError, match="missing parameter"):
        apply_checkpoint({"w": params["w"], "extra": params["w"]}, arrays)
    with pytest.raises(ParseError, match="unknown parameter"):
        apply_checkpoint({}, arrays)
    with pytest.raises(ParseError, match="shape"):
        apply_checkpoint({"w": Tensor(np.zeros(3), requires_grad=True)}, arrays)

    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(ParseError, match="invalid checkpoint"):
        load_checkpoint(bad)
    empty = tmp_path / "empty.json"
    empty.write_text("{}")
    with pytest.raises(ParseError, match="params"):
        load_checkpoint(empty)


def test_linear_and_conv_layer_grads():
    rng = np.random.default_rng(50)
    lin = nd.Linear(3, 4, rng)
    conv = nd.Conv1d(2, 3, 3, 2, rng)
    x = leaf((5, 3), 51)
    xc = leaf((6, 2), 52)
    fd_check(lambda: scalarize(lin(x)), [x, lin.weight, lin.bias])
    fd_check(lambda: scalarize(conv(xc)), [xc, conv.weight, conv.bias])
    assert conv.half_width == 2


def test_lstm_step_matches_sequence_call():
    rng = np.random.default_rng(53)
    cell = nd.LSTM(3, 4, rng)
    x = Tensor(np.random.default_rng(54).normal(size=(5, 3)))
    whole = cell(x)
    state = cell.initial_state()
    rows = []
    for t in range(5):
        h, state = cell.step(nd.narrow(x, 0, t, t + 1), state)
        rows.append(h.data)
    np.testing.assert_array_equal(whole.data, np.vstack(rows))
    assert whole.shape == (5, 4)


def test_lstm_gradients():
    rng = np.random.default_rng(55)
    cell = nd.LSTM(2, 3, rng)
    x = leaf((4, 2), 56)
    fd_check(lambda: scalarize(cell(x)), [x, cell.wx, cell.wh, cell.bias])


def test_dilation_schedule_budget():
    sched = nd.dilation_schedule(8, 32, kernel=3)
    assert len(sched) == 8
    half = sum((k - 1) // 2 * d for k, d in sched)
    assert half == 32
    assert sched[0] == (3, 1)
    assert sched[4] == (3, 16)
    # once the budget is gone, layers degrade to pointwise mixing
    assert sched[-1] == (1, 1)
    for n_layers in (1, 3, 12):
        for budget in (0, 1, 5, 64):
            s = nd.dilation_schedule(n_layers, budget)
            assert sum((k - 1) // 2 * d for k, d in s) <= budget
            assert len(s) == n_layers
    with pytest.raises(ValueError):
        nd.dilation_schedule(0, 4)
    with pytest.raises(ValueError):
        nd.dilation_schedule(4, -1)


def test_temporal_stack_locality():
    rng = np.random.default_rng(57)
    stack = nd.TemporalStack(3, 6, 4, 5, rng)
    hw = stack.receptive_half_width
    assert hw <= 5
    t_n = 40
    base = np.zeros((t_n, 3))
    poked = base.copy()
    hit = 20
    poked[hit] = 1.0
    out_base = stack(Tensor(base)).data
    out_poked = stack(Tensor(poked)).data
    changed = np.where(np.abs(out_poked - out_base).max(axis=1) > 1e-12)[0]
    assert changed.size > 0
    assert changed.min() >= hit - hw
    assert changed.max() <= hit + hw


def test_temporal_stack_gradients():
    rng = np.random.default_rng(58)
    stack = nd.TemporalStack(2, 4, 2, 3, rng)
    x = leaf((6, 2), 59)
    params = [p for _, p in stack.params()]
    fd_check(lambda: scalarize(stack(x)), [x] + params)


def test_uniform_init_bounds_and_determinism():
    a = nd.uniform_init(np.random.default_rng(5), (100, 4), 16)
    b = nd.uniform_init(np.random.default_rng(5), (100, 4), 16)
    np.testing.assert_array_equal(a.data, b.data)
    assert np.abs(a.data).max() <= 0.25
    assert a.requires_grad
