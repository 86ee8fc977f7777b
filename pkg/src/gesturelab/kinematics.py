"""Forward kinematics for parsed motion clips.

Rotations compose in the order the channels are declared on each joint
(the usual convention for this file family), so a CHANNELS line reading
"Zrotation Xrotation Yrotation" yields R = Rz @ Rx @ Ry acting on column
vectors. Angles are degrees in the frame matrix and converted here.

A joint's world position is its parent's position plus the accumulated
ancestor rotation applied to the joint offset; the root adds its
translation channels to its offset.
"""

from __future__ import annotations

import numpy as np

from .skeleton import MotionClip, PositionTrack, POSITION_CHANNELS

_AXES = {"X": 0, "Y": 1, "Z": 2}


def _axis_rotations(axis: str, degrees: np.ndarray) -> np.ndarray:
    """Stack of rotation matrices, shape (T, 3, 3), about a fixed axis."""
    t = np.deg2rad(degrees)
    c, s = np.cos(t), np.sin(t)
    T = len(t)
    R = np.zeros((T, 3, 3), dtype=np.float64)
    if axis == "X":
        R[:, 0, 0] = 1
        R[:, 1, 1], R[:, 1, 2] = c, -s
        R[:, 2, 1], R[:, 2, 2] = s, c
    elif axis == "Y":
        R[:, 1, 1] = 1
        R[:, 0, 0], R[:, 0, 2] = c, s
        R[:, 2, 0], R[:, 2, 2] = -s, c
    elif axis == "Z":
        R[:, 2, 2] = 1
        R[:, 0, 0], R[:, 0, 1] = c, -s
        R[:, 1, 0], R[:, 1, 1] = s, c
    else:
        raise ValueError(f"unknown rotation axis {axis!r}")
    return R


def _validate_order(order: str) -> str:
    if sorted(order) != ["X", "Y", "Z"]:
        raise ValueError(f"unknown rotation order {order!r}; expected a permutation of XYZ")
    return order


def forward_kinematics(clip: MotionClip, rotation_order: str | None = None) -> PositionTrack:
    """Compute global joint positions for every frame.

    rotation_order, when given, overrides the per-joint channel order: the
    named axes compose left to right, each angle pulled from the joint's
    matching rotation channel. None keeps file order.
    """
    if rotation_order is not None:
        rotation_order = _validate_order(rotation_order)

    T = clip.n_frames
    J = len(clip.skeleton)
    offsets = clip.channel_offsets()

    eye = np.broadcast_to(np.eye(3), (T, 3, 3)).copy()
    global_rot = np.empty((J, T, 3, 3), dtype=np.float64)
    positions = np.zeros((T, J, 3), dtype=np.float64)

    for ji, joint in enumerate(clip.skeleton):
        base = offsets[ji]
        rot_axes: list[tuple[str, np.ndarray]] = []
        translation = np.zeros((T, 3), dtype=np.float64)
        for ci, label in enumerate(joint.channels):
            col = clip.frames[:, base + ci]
            if label in POSITION_CHANNELS:
                translation[:, _AXES[label[0]]] = col
            else:
                rot_axes.append((label[0], col))

        if rotation_order is not None and rot_axes:
            by_axis = {axis: col for axis, col in rot_axes}
            rot_axes = [(axis, by_axis[axis]) for axis in rotation_order]

        local = eye
        for axis, col in rot_axes:
            local = local @ _axis_rotations(axis, col)

        if joint.parent is None:
            global_rot[ji] = local
            positions[:, ji] = joint.offset + translation
        else:
            parent_rot = global_rot[joint.parent]
            global_rot[ji] = parent_rot @ local
            step = joint.offset + translation
            positions[:, ji] = positions[:, joint.parent] + np.einsum(
                "tij,tj->ti", parent_rot, step
            )

    return PositionTrack(clip.fps, positions, joint_names=clip.joint_names)
