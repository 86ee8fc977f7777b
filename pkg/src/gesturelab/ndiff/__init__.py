from .tensor import (
    Tensor,
    Tape,
    add,
    backward,
    concat,
    conv1d_temporal,
    dense,
    embedding,
    l1_loss,
    leaky_relu,
    log,
    matmul,
    mean,
    mul,
    narrow,
    neg,
    reshape,
    scale,
    sigmoid,
    sub,
    tanh,
    tile_rows,
    trace,
)
from .nn import LSTM, Conv1d, Embedding, Linear, TemporalStack, dilation_schedule, lstm_seq, uniform_init
from .optim import AdamState, adam_step, zero_grads
from .checkpoint import apply_checkpoint, load_checkpoint, save_checkpoint

__all__ = [
    "Tensor", "Tape", "add", "backward", "concat", "conv1d_temporal", "dense",
    "embedding", "l1_loss", "leaky_relu", "log", "matmul", "mean", "mul",
    "narrow", "neg", "reshape", "scale", "sigmoid", "sub", "tanh", "tile_rows", "trace",
    "LSTM", "Conv1d", "Embedding", "Linear", "TemporalStack",
    "dilation_schedule", "lstm_seq", "uniform_init",
    "AdamState", "adam_step", "zero_grads",
    "apply_checkpoint", "load_checkpoint", "save_checkpoint",
]
