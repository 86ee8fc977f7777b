import numpy as np
import pytest

from gesturelab.errors import DataMismatchError
from gesturelab.skeleton import (
    BODY_JOINTS,
    HAND_JOINTS,
    Joint,
    MotionClip,
    PositionTrack,
    ROOT_NAME,
    partition_indices,
    standard_skeleton,
)

from conftest import tiny_skeleton


def test_reference_partition_sizes():
    assert len(BODY_JOINTS) == 27
    assert len(HAND_JOINTS) == 48
    skeleton = standard_skeleton()
    assert len(skeleton) == 76
    assert skeleton[0].name == ROOT_NAME
    assert sum(len(j.channels) for j in skeleton) == 231


def test_standard_skeleton_parents_precede_children():
    skeleton = standard_skeleton()
    for i, j in enumerate(skeleton):
        if i == 0:
            assert j.parent is None
        else:
            assert 0 <= j.parent < i


def test_partition_indices_cover_everything():
    names = tuple(j.name for j in standard_skeleton())
    body = partition_indices(names, "body")
    hands = partition_indices(names, "hands")
    assert len(body) == 27
    assert len(hands) == 48
    assert set(body).isdisjoint(hands)
    assert partition_indices(names, "all") == list(range(76))
    # the root is in neither named subset
    assert 0 not in body and 0 not in hands


def test_partition_indices_unknown_subset():
    with pytest.raises(ValueError):
        partition_indices(("Hips",), "tail")


def test_partition_indices_no_match():
    with pytest.raises(DataMismatchError):
        partition_indices(("Nonsense",), "body")


def test_joint_validates_offset_and_channels():
    with pytest.raises(ValueError):
        Joint("J", None, [1.0, 2.0], ("Zrotation", "Xrotation", "Yrotation"))
    with pytest.raises(ValueError):
        Joint("J", None, [0, 0, 0], ("Wrotation", "Xrotation", "Yrotation"))


def test_clip_rejects_bad_roots_and_parents():
    with pytest.raises(ValueError):
        MotionClip(
            [Joint("Hips", None, [0, 0, 0], ("Zrotation", "Xrotation", "Yrotation"))],
            30.0,
            np.zeros((1, 3)),
        )
    sk = tiny_skeleton()
    sk[2] = Joint("Head", 5, sk[2].offset, sk[2].channels)
    with pytest.raises(ValueError):
        MotionClip(sk, 30.0, np.zeros((1, 15)))


def test_clip_rejects_width_mismatch():
    with pytest.raises(DataMismatchError):
        MotionClip(tiny_skeleton(), 30.0, np.zeros((2, 14)))


def test_clip_properties():
    clip = MotionClip(tiny_skeleton(), 25.0, np.zeros((50, 15)))
    assert clip.channel_count == 15
    assert clip.n_frames == 50
    assert clip.duration == pytest.approx(2.0)
    assert clip.joint_names == ("Hips", "Spine", "Head", "LeftUpLeg")
    assert clip.channel_offsets() == [0, 6, 9, 12]
    copy = clip.copy()
    copy.frames[0, 0] = 9.0
    assert clip.frames[0, 0] == 0.0


def test_position_track_name_count_check():
    with pytest.raises(DataMismatchError):
        PositionTrack(30.0, np.zeros((2, 3, 3)), ("a", "b"))
