"""Parameterized layers on top of the tensor ops.

All weights initialize uniformly in [-sqrt(1/fan_in), sqrt(1/fan_in)]
from a caller-supplied numpy Generator, so a fixed seed reproduces a
model bit for bit. Layers expose params() as (name, Tensor) pairs;
containers prefix the names to build a flat parameter dict.
"""

from __future__ import annotations

import numpy as np

from . import tensor as tz
from .tensor import Tensor


def uniform_init(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> Tensor:
    bound = float(np.sqrt(1.0 / max(1, fan_in)))
    return Tensor(rng.uniform(-bound, bound, size=shape), requires_grad=True)


class Linear:
    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator):
        self.weight = uniform_init(rng, (in_dim, out_dim), in_dim)
        self.bias = uniform_init(rng, (out_dim,), in_dim)

    def __call__(self, x: Tensor) -> Tensor:
        return tz.dense(x, self.weight, self.bias)

    def params(self):
        yield "weight", self.weight
        yield "bias", self.bias


class Conv1d:
    """Centered dilated temporal convolution with bias."""

    def __init__(
        self, in_dim: int, out_dim: int, kernel: int, dilation: int, rng: np.random.Generator
    ):
        self.kernel = kernel
        self.dilation = dilation
        fan_in = in_dim * kernel
        self.weight = uniform_init(rng, (out_dim, in_dim, kernel), fan_in)
        self.bias = uniform_init(rng, (out_dim,), fan_in)

    def __call__(self, x: Tensor) -> Tensor:
        return tz.add(tz.conv1d_temporal(x, self.weight, self.dilation), self.bias)

    @property
    def half_width(self) -> int:
        return (self.kernel - 1) // 2 * self.dilation

    def params(self):
        yield "weight", self.weight
        yield "bias", self.bias


class Embedding:
    def __init__(self, count: int, dim: int, rng: np.random.Generator):
        self.table = uniform_init(rng, (count, dim), dim)

    def __call__(self, ids) -> Tensor:
        return tz.embedding(self.table, ids)

    def params(self):
        yield "table", self.table


class LSTM:
    """Single-layer LSTM over a (T, C) sequence, gates ordered i, f, g, o."""

    def __init__(self, in_dim: int, hidden: int, rng: np.random.Generator):
        self.hidden = hidden
        self.wx = uniform_init(rng, (in_dim, 4 * hidden), in_dim)
        self.wh = uniform_init(rng, (hidden, 4 * hidden), hidden)
        self.bias = uniform_init(rng, (4 * hidden,), in_dim)

    def initial_state(self) -> tuple[Tensor, Tensor]:
        return Tensor(np.zeros((1, self.hidden))), Tensor(np.zeros((1, self.hidden)))

    def step(self, x_t: Tensor, state: tuple[Tensor, Tensor]) -> tuple[Tensor, tuple[Tensor, Tensor]]:
        h, c = state
        H = self.hidden
        z = tz.add(tz.add(tz.matmul(x_t, self.wx), tz.matmul(h, self.wh)), self.bias)
        i = tz.sigmoid(tz.narrow(z, 1, 0, H))
        f = tz.sigmoid(tz.narrow(z, 1, H, 2 * H))
        g = tz.tanh(tz.narrow(z, 1, 2 * H, 3 * H))
        o = tz.sigmoid(tz.narrow(z, 1, 3 * H, 4 * H))
        c_new = tz.add(tz.mul(f, c), tz.mul(i, g))
        h_new = tz.mul(o, tz.tanh(c_new))
        return h_new, (h_new, c_new)

    def __call__(self, x: Tensor) -> Tensor:
        T = x.shape[0]
        state = self.initial_state()
        rows = []
        for t in range(T):
            h, state = self.step(tz.narrow(x, 0, t, t + 1), state)
            rows.append(h)
        return tz.concat(rows, axis=0)

    def params(self):
        yield "wx", self.wx
        yield "wh", self.wh
        yield "bias", self.bias


def lstm_seq(x: Tensor, cell: LSTM) -> Tensor:
    """Run an LSTM over a sequence; zero initial state, hidden rows out."""
    return cell(x)


def dilation_schedule(n_layers: int, half_window: int, kernel: int = 3) -> list[tuple[int, int]]:
    """(kernel, dilation) per layer so the stacked half-width never exceeds
    half_window.

    Dilations double while the budget lasts, then clamp to whatever
    remains; once the budget is spent the remaining layers fall back to
    kernel 1 (per-frame mixing, no temporal growth).
    """
    if n_layers < 1:
        raise ValueError("need at least one layer")
    if half_window < 0:
        raise ValueError("half_window must be non-negative")
    per_tap = (kernel - 1) // 2
    out: list[tuple[int, int]] = []
    remaining = half_window
    d = 1
    for _ in range(n_layers):
        if per_tap == 0 or remaining < per_tap:
            out.append((1, 1))
            continue
        use = min(d, remaining // per_tap)
        out.append((kernel, use))
        remaining -= use * per_tap
        d = use * 2
    return out


class TemporalStack:
    """Stack of dilated convolutions with skip connections.

    Each layer computes leaky_relu(conv(x)) + skip(x), the skip being
    identity when widths match and a learned width-matching 1x1
    convolution otherwise. The stacked receptive half-width is capped by
    the half_window argument via the dilation schedule.
    """

    def __init__(
        self,
        in_dim: int,
        width: int,
        n_layers: int,
        half_window: int,
        rng: np.random.Generator,
        kernel: int = 3,
        slope: float = 0.2,
    ):
        self.slope = slope
        self.layers: list[tuple[Conv1d, Linear | None]] = []
        dim = in_dim
        for k, d in dilation_schedule(n_layers, half_window, kernel):
            conv = Conv1d(dim, width, k, d, rng)
            skip = None if dim == width else Linear(dim, width, rng)
            self.layers.append((conv, skip))
            dim = width

    def __call__(self, x: Tensor) -> Tensor:
        for conv, skip in self.layers:
            carried = skip(x) if skip is not None else x
            x = tz.add(tz.leaky_relu(conv(x), self.slope), carried)
        return x

    @property
    def receptive_half_width(self) -> int:
        return sum(conv.half_width for conv, _ in self.layers)

    def params(self):
        for i, (conv, skip) in enumerate(self.layers):
            for name, p in conv.params():
                yield f"layer{i}.conv.{name}", p
            if skip is not None:
                for name, p in skip.params():
                    yield f"layer{i}.skip.{name}", p
