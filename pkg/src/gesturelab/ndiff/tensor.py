"""Dense float64 tensors with recorded-operation reverse-mode differentiation.

Every operation eagerly computes its result and, when any input needs
gradients, records a node holding the input tensors and one
vector-Jacobian closure per input. Creation order doubles as a
topological order of the graph, so the backward pass just walks the
recorded nodes in reverse, accumulating gradients into .grad.

The op set is exactly what the gesture network needs: elementwise
arithmetic with numpy-style broadcasting (unbroadcast on the way back),
2-D matmul, a centered dilated temporal convolution, slicing and
concatenation, the usual activations, embedding lookup, means and an L1
loss. Everything is single-threaded per graph and deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import NumericError

_counter = itertools.count()


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "node", "_seq")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = bool(requires_grad)
        self.node: Node | None = None
        self._seq = next(_counter)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        return float(self.data.item())

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy())

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        backward(self)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    def __add__(self, other):
        return add(self, _wrap(other))

    def __radd__(self, other):
        return add(_wrap(other), self)

    def __sub__(self, other):
        return sub(self, _wrap(other))

    def __rsub__(self, other):
        return sub(_wrap(other), self)

    def __mul__(self, other):
        return mul(self, _wrap(other))

    def __rmul__(self, other):
        return mul(_wrap(other), self)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, _wrap(other))


class Node:
    """One recorded operation: output, inputs, and per-input vjp closures."""

    __slots__ = ("op", "inputs", "vjps", "output")

    def __init__(self, op: str, inputs: tuple[Tensor, ...], vjps: tuple, output: Tensor):
        self.op = op
        self.inputs = inputs
        self.vjps = vjps
        self.output = output


@dataclass
class Tape:
    """Recorded nodes reachable from one output, in topological order."""

    nodes: list[Node]

    @classmethod
    def from_output(cls, out: Tensor) -> "Tape":
        seen: set[int] = set()
        nodes: list[Node] = []
        stack = [out]
        while stack:
            t = stack.pop()
            node = t.node
            if node is None or id(node) in seen:
                continue
            seen.add(id(node))
            nodes.append(node)
            stack.extend(node.inputs)
        nodes.sort(key=lambda n: n.output._seq)
        return cls(nodes)


def _wrap(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _make(op: str, out_data: np.ndarray, inputs: Sequence[Tensor], vjps: Sequence) -> Tensor:
    out = Tensor(out_data)
    if any(t.requires_grad for t in inputs):
        out.requires_grad = True
        out.node = Node(op, tuple(inputs), tuple(vjps), out)
    return out


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to the operand's shape."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


# -- elementwise arithmetic -------------------------------------------------

def add(a: Tensor, b: Tensor) -> Tensor:
    return _make(
        "add", a.data + b.data, (a, b),
        (lambda g: _unbroadcast(g, a.shape), lambda g: _unbroadcast(g, b.shape)),
    )


def sub(a: Tensor, b: Tensor) -> Tensor:
    return _make(
        "sub", a.data - b.data, (a, b),
        (lambda g: _unbroadcast(g, a.shape), lambda g: _unbroadcast(-g, b.shape)),
    )


def mul(a: Tensor, b: Tensor) -> Tensor:
    return _make(
        "mul", a.data * b.data, (a, b),
        (
            lambda g: _unbroadcast(g * b.data, a.shape),
            lambda g: _unbroadcast(g * a.data, b.shape),
        ),
    )


def neg(a: Tensor) -> Tensor:
    return _make("neg", -a.data, (a,), (lambda g: -g,))


def scale(a: Tensor, factor: float) -> Tensor:
    f = float(factor)
    return _make("scale", a.data * f, (a,), (lambda g: g * f,))


# -- linear algebra ---------------------------------------------------------

def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ValueError("matmul expects 2-D operands")
    return _make(
        "matmul", a.data @ b.data, (a, b),
        (lambda g: g @ b.data.T, lambda g: a.data.T @ g),
    )


def dense(x: Tensor, weight: Tensor, bias: Tensor | None = None) -> Tensor:
    """x @ weight + bias with the bias broadcast over rows."""
    out = matmul(x, weight)
    if bias is not None:
        out = add(out, bias)
    return out


# -- activations and pointwise maps ------------------------------------------

def leaky_relu(x: Tensor, slope: float = 0.2) -> Tensor:
    factor = np.where(x.data >= 0.0, 1.0, slope)
    return _make("leaky_relu", x.data * factor, (x,), (lambda g: g * factor,))


def sigmoid(x: Tensor) -> Tensor:
    s = 1.0 / (1.0 + np.exp(-x.data))
    return _make("sigmoid", s, (x,), (lambda g: g * s * (1.0 - s),))


def tanh(x: Tensor) -> Tensor:
    t = np.tanh(x.data)
    return _make("tanh", t, (x,), (lambda g: g * (1.0 - t * t),))


def log(x: Tensor) -> Tensor:
    if np.any(x.data <= 0.0):
        raise NumericError("log of a non-positive value")
    return _make("log", np.log(x.data), (x,), (lambda g: g / x.data,))


# -- reductions ---------------------------------------------------------------

def mean(x: Tensor, axis: int | None = None) -> Tensor:
    if axis is None:
        n = x.data.size
        return _make(
            "mean", np.asarray(x.data.mean()), (x,),
            (lambda g: np.full(x.shape, float(g) / n),)
        )
    if axis != 0:
        raise ValueError("mean supports axis None or 0")
    n = x.data.shape[0]
    return _make(
        "mean0", x.data.mean(axis=0), (x,),
        (lambda g: np.broadcast_to(g / n, x.shape).copy(),),
    )


def l1_loss(a: Tensor, b: Tensor) -> Tensor:
    """Mean absolute difference. The subgradient at exact ties is zero."""
    if a.shape != b.shape:
        raise ValueError(f"l1_loss shapes differ: {a.shape} vs {b.shape}")
    diff = a.data - b.data
    n = diff.size
    sign = np.sign(diff)
    return _make(
        "l1_loss", np.asarray(np.abs(diff).mean()), (a, b),
        (lambda g: float(g) * sign / n, lambda g: -float(g) * sign / n),
    )


# -- shape plumbing -----------------------------------------------------------

def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = list(tensors)
    if not tensors:
        raise ValueError("concat of nothing")
    if axis not in (0, 1):
        raise ValueError("concat supports axis 0 or 1")
    data = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.data.shape[axis] for t in tensors]
    bounds = np.cumsum([0] + sizes)

    def make_vjp(i: int):
        lo, hi = bounds[i], bounds[i + 1]
        if axis == 0:
            return lambda g: g[lo:hi]
        return lambda g: g[:, lo:hi]

    return _make("concat", data, tuple(tensors), tuple(make_vjp(i) for i in range(len(tensors))))


def narrow(x: Tensor, axis: int, start: int, stop: int) -> Tensor:
    """Contiguous slice along one axis; gradients scatter back as zeros."""
    if axis not in (0, 1):
        raise ValueError("narrow supports axis 0 or 1")
    if axis >= x.data.ndim:
        raise ValueError(f"axis {axis} out of range for shape {x.shape}")
    n = x.data.shape[axis]
    if not 0 <= start < stop <= n:
        raise ValueError(f"narrow range [{start}, {stop}) invalid for length {n}")
    data = x.data[start:stop] if axis == 0 else x.data[:, start:stop]

    def vjp(g):
        out = np.zeros_like(x.data)
        if axis == 0:
            out[start:stop] = g
        else:
            out[:, start:stop] = g
        return out

    return _make("narrow", data.copy(), (x,), (vjp,))


def reshape(x: Tensor, shape: tuple[int, ...]) -> Tensor:
    data = x.data.reshape(shape)
    return _make("reshape", data.copy(), (x,), (lambda g: g.reshape(x.shape),))


def tile_rows(x: Tensor, reps: int) -> Tensor:
    """Repeat a single row (1, C) down to (reps, C)."""
    if x.data.ndim != 2 or x.data.shape[0] != 1:
        raise ValueError("tile_rows expects a (1, C) tensor")
    return _make(
        "tile_rows", np.repeat(x.data, reps, axis=0), (x,),
        (lambda g: g.sum(axis=0, keepdims=True),),
    )


def embedding(table: Tensor, ids) -> Tensor:
    """Row lookup into a (V, E) table; ids is an integer array."""
    ids = np.asarray(ids, dtype=np.int64)
    if ids.ndim != 1:
        raise ValueError("ids must be a 1-D integer array")
    if table.data.ndim != 2:
        raise ValueError("embedding table must be 2-D")
    if ids.size and (ids.min() < 0 or ids.max() >= table.data.shape[0]):
        raise ValueError("embedding id out of range")

    def vjp(g):
        out = np.zeros_like(table.data)
        np.add.at(out, ids, g)
        return out

    return _make("embedding", table.data[ids], (table,), (vjp,))


# -- temporal convolution ------------------------------------------------------

def conv1d_temporal(x: Tensor, kernels: Tensor, dilation: int = 1) -> Tensor:
    """Centered dilated convolution over time.

    x is (T, C_in), kernels (C_out, C_in, K) with odd K; the output is
    (T, C_out), zero padded so tap j reads frame t + (j - K//2) *
    dilation. Bias, when wanted, is a separate broadcast add.
    """
    if x.data.ndim != 2 or kernels.data.ndim != 3:
        raise ValueError("conv1d_temporal expects x (T, C_in) and kernels (C_out, C_in, K)")
    T, c_in = x.data.shape
    c_out, c_in_k, K = kernels.data.shape
    if c_in_k != c_in:
        raise ValueError(f"kernel expects {c_in_k} input channels, x has {c_in}")
    if K % 2 != 1:
        raise ValueError("kernel width must be odd for a centered convolution")
    if dilation < 1:
        raise ValueError("dilation must be at least 1")

    center = K // 2
    shifts = [(j - center) * dilation for j in range(K)]

    def shifted(arr: np.ndarray, s: int) -> np.ndarray:
        if s == 0:
            return arr
        out = np.zeros_like(arr)
        if abs(s) >= T:
            return out
        if s > 0:
            out[: T - s] = arr[s:]
        else:
            out[-s:] = arr[: T + s]
        return out

    y = np.zeros((T, c_out), dtype=np.float64)
    for j, s in enumerate(shifts):
        y += shifted(x.data, s) @ kernels.data[:, :, j].T

    def vjp_x(g):
        dx = np.zeros_like(x.data)
        for j, s in enumerate(shifts):
            dx += shifted(g, -s) @ kernels.data[:, :, j]
        return dx

    def vjp_k(g):
        dk = np.empty_like(kernels.data)
        for j, s in enumerate(shifts):
            dk[:, :, j] = g.T @ shifted(x.data, s)
        return dk

    return _make("conv1d", y, (x, kernels), (vjp_x, vjp_k))


# -- backward ------------------------------------------------------------------

def trace(output: Tensor) -> Tape:
    return Tape.from_output(output)


def backward(loss: Tensor, tape: Tape | None = None) -> None:
    """Accumulate d(loss)/d(tensor) into .grad for every tensor in the graph.

    loss must be a scalar. Parameters that do not reach the loss keep a
    None gradient, which optimizers treat as zero.
    """
    if loss.data.size != 1:
        raise ValueError(f"backward needs a scalar loss, got shape {loss.shape}")
    if tape is None:
        tape = trace(loss)
    loss.grad = np.ones_like(loss.data)
    for node in reversed(tape.nodes):
        g = node.output.grad
        if g is None:
            continue
        for inp, vjp in zip(node.inputs, node.vjps):
            if vjp is None or not inp.requires_grad:
                continue
            piece = vjp(g)
            if inp.grad is None:
                inp.grad = piece
            else:
                inp.grad = inp.grad + piece
