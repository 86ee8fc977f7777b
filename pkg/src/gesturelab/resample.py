"""Frame-rate conversion for motion clips and blendshape tracks.

When the source rate is an integer multiple of the target, frames are
decimated (every k-th frame starting at index 0), which keeps values
bit-exact; otherwise each output frame is linearly interpolated at its
timestamp on the source timeline. Output frame i sits at time i /
target_fps, and the output length is the number of such timestamps that
fall inside the source clip.
"""

from __future__ import annotations

import numpy as np

from .errors import DataMismatchError


def _resample_matrix(values: np.ndarray, src_fps: float, target_fps: float) -> np.ndarray:
    if values.shape[0] == 0:
        raise DataMismatchError("cannot resample an empty clip")
    if target_fps <= 0:
        raise ValueError(f"target fps must be positive, got {target_fps}")
    if abs(src_fps - target_fps) < 1e-9:
        return values.copy()

    T = values.shape[0]
    ratio = src_fps / target_fps
    k = round(ratio)
    if k >= 1 and abs(ratio - k) < 1e-9:
        return values[::k].copy()

    n_out = int(np.floor((T - 1) / ratio)) + 1
    pos = np.arange(n_out) * ratio
    lo = np.floor(pos).astype(int)
    hi = np.minimum(lo + 1, T - 1)
    frac = (pos - lo)[:, None]
    return (1.0 - frac) * values[lo] + frac * values[hi]


def resample(obj, target_fps: float):
    """Return a copy of a MotionClip or BlendshapeTrack at target_fps.

    Resampling twice at the same rate is a no-op beyond the first call.
    """
    from .skeleton import MotionClip
    from .blendshapes import BlendshapeTrack

    if isinstance(obj, MotionClip):
        frames = _resample_matrix(obj.frames, obj.fps, target_fps)
        return MotionClip(list(obj.skeleton), float(target_fps), frames)
    if isinstance(obj, BlendshapeTrack):
        weights = _resample_matrix(obj.weights, obj.fps, target_fps)
        return BlendshapeTrack(float(target_fps), obj.names, weights)
    raise TypeError(f"cannot resample {type(obj).__name__}")
