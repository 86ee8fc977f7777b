"""Onset and gesture-beat extraction.

Audio beats are local maxima of the positive first difference of a
short-window RMS envelope, thresholded relative to the strongest rise.
Motion beats are local minima of mean joint speed, the frames where the
body pauses between strokes. Both emit times in seconds so they can be
compared directly.

Defaults follow the evaluation setup used across this toolkit: 50 ms RMS
windows, a hop of one 30 Hz frame, onset threshold 0.3, and body joints
only for motion (finger noise otherwise dominates the speed signal).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .audio import AudioTrack
from .errors import DataMismatchError
from .skeleton import PositionTrack, partition_indices

DEFAULT_WINDOW = 0.05
DEFAULT_HOP = 1.0 / 30.0
DEFAULT_THRESHOLD = 0.3


@dataclass
class Envelope:
    """RMS energy samples spaced hop seconds apart."""

    hop: float
    values: np.ndarray

    def __post_init__(self):
        if self.hop <= 0:
            raise ValueError("hop must be positive")
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1:
            raise ValueError("envelope values must be 1-D")
        if self.values.size and self.values.min() < 0:
            raise ValueError("envelope values must be non-negative")


@dataclass
class BeatSequence:
    """Strictly increasing beat times in seconds."""

    times: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        if self.times.ndim != 1:
            raise ValueError("times must be 1-D")
        if self.times.size:
            if self.times[0] < 0:
                raise ValueError("beat times must be non-negative")
            if np.any(np.diff(self.times) <= 0):
                raise ValueError("beat times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.times)


def rms_envelope(
    track: AudioTrack, window: float = DEFAULT_WINDOW, hop: float = DEFAULT_HOP
) -> Envelope:
    """Root-mean-square energy over sliding windows.

    Value k covers samples in [k * hop, k * hop + window); only windows
    that fit entirely inside the signal are emitted.
    """
    if track.n_channels != 1:
        raise DataMismatchError("rms_envelope expects a mono track; downmix first")
    if window <= 0 or hop <= 0:
        raise ValueError("window and hop must be positive")
    w = int(round(window * track.sample_rate))
    h = hop * track.sample_rate
    if w < 1:
        raise ValueError(
            f"window {window} s is shorter than one sample at {track.sample_rate} Hz"
        )
    x = track.samples[0]
    n = len(x)
    if n < w:
        return Envelope(hop, np.zeros(0))
    n_hops = int(np.floor((n - w) / h)) + 1
    sq = np.concatenate([[0.0], np.cumsum(x * x)])
    starts = np.floor(np.arange(n_hops) * h).astype(int)
    sums = sq[starts + w] - sq[starts]
    return Envelope(hop, np.sqrt(np.maximum(sums, 0.0) / w))


def audio_beats(env: Envelope, delta_threshold: float = DEFAULT_THRESHOLD) -> BeatSequence:
    """Onset times from an RMS envelope.

    A beat lands at hop k when the energy rise e[k] - e[k-1] is a local
    maximum of the positive-rise sequence (plateaus resolve to their
    earliest hop) and is at least delta_threshold times the largest rise.
    """
    if not 0.0 < delta_threshold <= 1.0:
        raise ValueError(f"delta_threshold must be in (0, 1], got {delta_threshold}")
    if env.values.size < 2:
        raise DataMismatchError("envelope too short for onset detection")
    deltas = np.diff(env.values)
    rises = np.maximum(deltas, 0.0)
    peak = rises.max()
    if peak <= 0.0:
        return BeatSequence(np.zeros(0))
    floor = delta_threshold * peak

    times = []
    for j in range(len(rises)):
        if rises[j] <= 0.0 or rises[j] < floor:
            continue
        left = rises[j - 1] if j > 0 else -np.inf
        right = rises[j + 1] if j + 1 < len(rises) else -np.inf
        if rises[j] > left and rises[j] >= right:
            times.append((j + 1) * env.hop)
    return BeatSequence(np.asarray(times))


def motion_velocity(
    track: PositionTrack, joints: str | Sequence[int] = "body"
) -> np.ndarray:
    """Mean joint speed per frame, in position units per second.

    v[t] compares frames t and t - 1; v[0] copies v[1] so the array
    aligns with the clip. joints is 'body', 'hands', 'all' or an explicit
    index sequence.
    """
    if track.n_frames < 2:
        raise DataMismatchError("need at least 2 frames for velocities")
    if isinstance(joints, str):
        if track.joint_names is None and joints != "all":
            raise DataMismatchError(
                "position track has no joint names; pass explicit indices"
            )
        idx = partition_indices(track.joint_names or (), joints) if joints != "all" else list(
            range(track.n_joints)
        )
    else:
        idx = list(joints)
        if not idx:
            raise DataMismatchError("empty joint subset")
        if any(not 0 <= i < track.n_joints for i in idx):
            raise DataMismatchError("joint index out of range")

    p = track.positions[:, idx, :]
    steps = np.linalg.norm(np.diff(p, axis=0), axis=2)
    v = steps.mean(axis=1) * track.fps
    return np.concatenate([[v[0]], v])


def motion_beats(velocity: np.ndarray, fps: float) -> BeatSequence:
    """Frames where the speed curve bottoms out, as times in seconds.

    Frame t is a beat when v[t] < v[t-1] and v[t] <= v[t+1]; on a flat
    valley only the earliest frame qualifies.
    """
    v = np.asarray(velocity, dtype=np.float64)
    if v.ndim != 1 or len(v) < 3:
        raise DataMismatchError("need at least 3 velocity samples")
    if fps <= 0:
        raise ValueError("fps must be positive")
    t = np.arange(1, len(v) - 1)
    mask = (v[t] < v[t - 1]) & (v[t] <= v[t + 1])
    return BeatSequence(t[mask] / fps)
