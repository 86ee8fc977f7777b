"""Facial blendshape tracks.

Capture rigs in this corpus export 52 facial action channels per frame,
named after the common mobile face-tracking set. Documents are JSON of
the form {"fps": 60, "channels": {name: [w, ...], ...}} with weights in
[0, 1]. Parsing validates the channel set against the canonical list,
rejects ragged arrays, and clamps out-of-range weights while counting
how many were touched.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError

BLENDSHAPE_NAMES: tuple[str, ...] = (
    "browDownLeft", "browDownRight", "browInnerUp",
    "browOuterUpLeft", "browOuterUpRight",
    "cheekPuff", "cheekSquintLeft", "cheekSquintRight",
    "eyeBlinkLeft", "eyeBlinkRight",
    "eyeLookDownLeft", "eyeLookDownRight",
    "eyeLookInLeft", "eyeLookInRight",
    "eyeLookOutLeft", "eyeLookOutRight",
    "eyeLookUpLeft", "eyeLookUpRight",
    "eyeSquintLeft", "eyeSquintRight",
    "eyeWideLeft", "eyeWideRight",
    "jawForward", "jawLeft", "jawOpen", "jawRight",
    "mouthClose", "mouthDimpleLeft", "mouthDimpleRight",
    "mouthFrownLeft", "mouthFrownRight", "mouthFunnel",
    "mouthLeft", "mouthLowerDownLeft", "mouthLowerDownRight",
    "mouthPressLeft", "mouthPressRight", "mouthPucker",
    "mouthRight", "mouthRollLower", "mouthRollUpper",
    "mouthShrugLower", "mouthShrugUpper",
    "mouthSmileLeft", "mouthSmileRight",
    "mouthStretchLeft", "mouthStretchRight",
    "mouthUpperUpLeft", "mouthUpperUpRight",
    "noseSneerLeft", "noseSneerRight",
    "tongueOut",
)

assert len(BLENDSHAPE_NAMES) == 52


@dataclass
class BlendshapeTrack:
    """Per-frame facial weights, shape (T, 52), values in [0, 1]."""

    fps: float
    names: tuple[str, ...]
    weights: np.ndarray
    n_clamped: int = 0

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        self.names = tuple(self.names)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.ndim != 2 or self.weights.shape[1] != len(self.names):
            raise ValueError(
                f"weights shape {self.weights.shape} does not match {len(self.names)} channels"
            )
        if self.weights.size and (self.weights.min() < 0.0 or self.weights.max() > 1.0):
            raise ValueError("weights must lie in [0, 1]")

    @property
    def n_frames(self) -> int:
        return self.weights.shape[0]


def parse_blendshapes(document) -> BlendshapeTrack:
    """Parse a blendshape JSON document (text, bytes or a decoded dict).

    Channels are reordered to the canonical name order. Out-of-range
    weights are clamped into [0, 1]; the count of clamped values lands in
    the returned track's n_clamped and triggers a single warning.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise ParseError("blendshape document must be a JSON object")

    if "fps" not in document:
        raise ParseError("missing 'fps' field")
    try:
        fps = float(document["fps"])
    except (TypeError, ValueError):
        raise ParseError(f"fps must be a number, got {document['fps']!r}") from None
    if fps <= 0:
        raise ParseError(f"fps must be positive, got {fps}")

    channels = document.get("channels")
    if not isinstance(channels, dict):
        raise ParseError("missing 'channels' object")

    unknown = sorted(set(channels) - set(BLENDSHAPE_NAMES))
    if unknown:
        raise ParseError(f"unknown blendshape channel {unknown[0]!r}")
    missing = [n for n in BLENDSHAPE_NAMES if n not in channels]
    if missing:
        raise ParseError(f"missing blendshape channel {missing[0]!r}")

    lengths = {n: len(channels[n]) for n in BLENDSHAPE_NAMES}
    if len(set(lengths.values())) != 1:
        a = BLENDSHAPE_NAMES[0]
        b = next(n for n in BLENDSHAPE_NAMES if lengths[n] != lengths[a])
        raise ParseError(
            f"ragged channels: {a!r} has {lengths[a]} frames, {b!r} has {lengths[b]}"
        )

    try:
        weights = np.asarray(
            [channels[n] for n in BLENDSHAPE_NAMES], dtype=np.float64
        ).T
    except (TypeError, ValueError):
        raise ParseError("channel weights must be numeric arrays") from None
    if weights.size and not np.isfinite(weights).all():
        raise ParseError("channel weights must be finite")

    clipped = np.clip(weights, 0.0, 1.0)
    n_clamped = int(np.count_nonzero(clipped != weights))
    if n_clamped:
        warnings.warn(f"clamped {n_clamped} blendshape weights into [0, 1]", stacklevel=2)

    return BlendshapeTrack(fps, BLENDSHAPE_NAMES, clipped, n_clamped=n_clamped)


def read_blendshapes(path) -> BlendshapeTrack:
    with open(path, "r") as fh:
        return parse_blendshapes(fh.read())


def write_blendshapes(track: BlendshapeTrack, path=None) -> str:
    doc = {
        "fps": track.fps,
        "channels": {n: track.weights[:, i].tolist() for i, n in enumerate(track.names)},
    }
    text = json.dumps(doc, sort_keys=True)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
