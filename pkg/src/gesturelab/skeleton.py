"""Skeleton and motion containers shared by parsing, kinematics and metrics.

A motion clip is a joint hierarchy plus a frame matrix. The root joint
carries six channels (translation then rotation), every other joint
carries exactly three rotation channels, so a hierarchy with J joints has
C = 6 + 3*(J - 1) columns. Angles are stored in degrees exactly as they
appear in BVH files; positions are centimeters.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DataMismatchError

POSITION_CHANNELS = ("Xposition", "Yposition", "Zposition")
ROTATION_CHANNELS = ("Xrotation", "Yrotation", "Zrotation")
VALID_CHANNELS = POSITION_CHANNELS + ROTATION_CHANNELS


@dataclass
class Joint:
    """One node of the hierarchy.

    parent is the index of the parent joint in the clip's joint list, or
    None for the root. offset is the rest-pose translation relative to the
    parent, in centimeters.
    """

    name: str
    parent: int | None
    offset: np.ndarray
    channels: tuple[str, ...]

    def __post_init__(self):
        self.offset = np.asarray(self.offset, dtype=np.float64)
        if self.offset.shape != (3,):
            raise ValueError(f"joint {self.name!r}: offset must be a 3-vector")
        self.channels = tuple(self.channels)
        bad = [c for c in self.channels if c not in VALID_CHANNELS]
        if bad:
            raise ValueError(f"joint {self.name!r}: unknown channels {bad}")


@dataclass
class MotionClip:
    """A parsed motion clip: hierarchy, frame rate and the channel matrix.

    frames has one row per frame and one column per declared channel, in
    hierarchy order.
    """

    skeleton: list[Joint]
    fps: float
    frames: np.ndarray

    def __post_init__(self):
        if not self.skeleton:
            raise ValueError("empty skeleton")
        if self.fps <= 0:
            raise ValueError(f"fps must be positive, got {self.fps}")
        for i, j in enumerate(self.skeleton):
            if i == 0:
                if j.parent is not None:
                    raise ValueError("first joint must be the root (parent None)")
                n_pos = sum(c in POSITION_CHANNELS for c in j.channels)
                n_rot = sum(c in ROTATION_CHANNELS for c in j.channels)
                if len(j.channels) != 6 or n_pos != 3 or n_rot != 3:
                    raise ValueError(
                        f"root joint {j.name!r} must carry 3 position + 3 rotation channels"
                    )
            else:
                if j.parent is None:
                    raise ValueError(f"joint {j.name!r}: only the first joint may be the root")
                if not 0 <= j.parent < i:
                    raise ValueError(
                        f"joint {j.name!r}: parent index {j.parent} must precede the joint"
                    )
                if len(j.channels) != 3 or any(c not in ROTATION_CHANNELS for c in j.channels):
                    raise ValueError(
                        f"joint {j.name!r}: non-root joints carry exactly 3 rotation channels"
                    )
        self.frames = np.asarray(self.frames, dtype=np.float64)
        if self.frames.ndim != 2:
            raise ValueError("frames must be a 2-D array")
        want = self.channel_count
        if self.frames.shape[1] != want:
            raise DataMismatchError(
                f"frame matrix has {self.frames.shape[1]} columns, hierarchy declares {want}"
            )

    @property
    def channel_count(self) -> int:
        return sum(len(j.channels) for j in self.skeleton)

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def duration(self) -> float:
        return self.n_frames / self.fps

    @property
    def joint_names(self) -> tuple[str, ...]:
        return tuple(j.name for j in self.skeleton)

    def channel_offsets(self) -> list[int]:
        """Column index where each joint's channel block starts."""
        out, acc = [], 0
        for j in self.skeleton:
            out.append(acc)
            acc += len(j.channels)
        return out

    def copy(self) -> "MotionClip":
        joints = [Joint(j.name, j.parent, j.offset.copy(), j.channels) for j in self.skeleton]
        return MotionClip(joints, self.fps, self.frames.copy())


@dataclass
class PositionTrack:
    """Global joint positions over time, shape (T, J, 3), centimeters."""

    fps: float
    positions: np.ndarray
    joint_names: tuple[str, ...] | None = None

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=np.float64)
        if self.positions.ndim != 3 or self.positions.shape[2] != 3:
            raise ValueError("positions must have shape (T, J, 3)")
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        if self.joint_names is not None:
            self.joint_names = tuple(self.joint_names)
            if len(self.joint_names) != self.positions.shape[1]:
                raise DataMismatchError(
                    f"{len(self.joint_names)} joint names for {self.positions.shape[1]} joints"
                )

    @property
    def n_frames(self) -> int:
        return self.positions.shape[0]

    @property
    def n_joints(self) -> int:
        return self.positions.shape[1]


def write_positions_csv(track: PositionTrack, path) -> None:
    """Dump a position track as rows of (t, joint, x, y, z)."""
    names = track.joint_names or tuple(str(i) for i in range(track.n_joints))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "joint", "x", "y", "z"])
        for t in range(track.n_frames):
            ts = f"{t / track.fps:.10g}"
            for n, p in zip(names, track.positions[t]):
                w.writerow([ts, n, f"{p[0]:.10g}", f"{p[1]:.10g}", f"{p[2]:.10g}"])


# ---------------------------------------------------------------------------
# Reference skeleton
#
# The capture rig this toolkit targets has 76 joints: a translating root,
# 27 body joints and 48 finger joints (24 per hand). The partition below
# drives the default joint subsets used by beat extraction and by the
# synthesis network's output split (27*3 = 81 body channels, 48*3 = 144
# hand channels).
# ---------------------------------------------------------------------------

ROOT_NAME = "Hips"

BODY_JOINTS = (
    "Spine", "Spine1", "Spine2", "Spine3", "Spine4",
    "Neck", "Neck1", "Head", "HeadEnd",
    "LeftShoulder", "LeftArm", "LeftForeArm", "LeftHand",
    "RightShoulder", "RightArm", "RightForeArm", "RightHand",
    "LeftUpLeg", "LeftLeg", "LeftFoot", "LeftToeBase", "LeftToeBaseEnd",
    "RightUpLeg", "RightLeg", "RightFoot", "RightToeBase", "RightToeBaseEnd",
)

_FINGERS = ("Thumb", "Index", "Middle", "Ring", "Pinky")


def _hand_joints(side: str) -> tuple[str, ...]:
    names = []
    for finger in _FINGERS[1:]:
        names.append(f"{side}InHand{finger}")
    for finger in _FINGERS:
        for seg in range(1, 5):
            names.append(f"{side}Hand{finger}{seg}")
    return tuple(names)


HAND_JOINTS = _hand_joints("Left") + _hand_joints("Right")

assert len(BODY_JOINTS) == 27
assert len(HAND_JOINTS) == 48


def standard_skeleton() -> list[Joint]:
    """Build the 76-joint reference hierarchy with stylized offsets."""

    joints: list[Joint] = []
    index: dict[str, int] = {}

    def add(name: str, parent: str | None, offset) -> None:
        pidx = None if parent is None else index[parent]
        channels = POSITION_CHANNELS + ROTATION_CHANNELS if parent is None else ROTATION_CHANNELS
        index[name] = len(joints)
        joints.append(Joint(name, pidx, np.asarray(offset, dtype=np.float64), channels))

    add(ROOT_NAME, None, (0.0, 0.0, 0.0))
    spine = [ROOT_NAME, "Spine", "Spine1", "Spine2", "Spine3", "Spine4"]
    for lo, hi in zip(spine, spine[1:]):
        add(hi, lo, (0.0, 10.0, 0.0))
    for name, parent, off in [
        ("Neck", "Spine4", (0.0, 8.0, 0.0)),
        ("Neck1", "Neck", (0.0, 5.0, 0.0)),
        ("Head", "Neck1", (0.0, 6.0, 0.0)),
        ("HeadEnd", "Head", (0.0, 16.0, 0.0)),
    ]:
        add(name, parent, off)

    # the list must stay in depth-first order (each subtree contiguous) so
    # that clips built on it serialize without any column shuffling: arms
    # and fingers hang off Spine4 and come first, legs hang off the root
    # and close the list
    for side, sx in (("Left", 1.0), ("Right", -1.0)):
        add(f"{side}Shoulder", "Spine4", (sx * 6.0, 5.0, 0.0))
        add(f"{side}Arm", f"{side}Shoulder", (sx * 12.0, 0.0, 0.0))
        add(f"{side}ForeArm", f"{side}Arm", (sx * 26.0, 0.0, 0.0))
        add(f"{side}Hand", f"{side}ForeArm", (sx * 25.0, 0.0, 0.0))

        # one contiguous chain per finger; all but the thumb get a metacarpal
        for fi, finger in enumerate(_FINGERS):
            if finger == "Thumb":
                base, seg_len = f"{side}Hand", 3.5
            else:
                add(f"{side}InHand{finger}", f"{side}Hand", (sx * 3.0, 0.0, 2.0 - 1.5 * (fi - 1)))
                base, seg_len = f"{side}InHand{finger}", 3.0
            add(f"{side}Hand{finger}1", base, (sx * 4.0, 0.0, 0.0))
            for seg in range(2, 5):
                add(f"{side}Hand{finger}{seg}", f"{side}Hand{finger}{seg - 1}", (sx * seg_len, 0.0, 0.0))

    for side, sx in (("Left", 1.0), ("Right", -1.0)):
        add(f"{side}UpLeg", ROOT_NAME, (sx * 9.0, -4.0, 0.0))
        add(f"{side}Leg", f"{side}UpLeg", (0.0, -40.0, 0.0))
        add(f"{side}Foot", f"{side}Leg", (0.0, -40.0, 0.0))
        add(f"{side}ToeBase", f"{side}Foot", (0.0, -6.0, 12.0))
        add(f"{side}ToeBaseEnd", f"{side}ToeBase", (0.0, 0.0, 6.0))

    assert len(joints) == 76
    return joints


def partition_indices(joint_names: Sequence[str], which: str) -> list[int]:
    """Indices of the requested joint subset within joint_names.

    which is one of 'body', 'hands' or 'all'. Membership is by name
    against the reference partition; 'all' keeps every joint.
    """
    if which == "all":
        return list(range(len(joint_names)))
    if which == "body":
        wanted = set(BODY_JOINTS)
    elif which == "hands":
        wanted = set(HAND_JOINTS)
    else:
        raise ValueError(f"unknown joint subset {which!r}")
    idx = [i for i, n in enumerate(joint_names) if n in wanted]
    if not idx:
        raise DataMismatchError(f"no joints from the {which!r} partition present")
    return idx
