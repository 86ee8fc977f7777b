import numpy as np
import pytest

from gesturelab.skeleton import Joint, MotionClip, standard_skeleton


def tiny_skeleton() -> list[Joint]:
    """Root plus a two-bone chain and a sibling, enough to exercise FK."""
    return [
        Joint("Hips", None, [0.0, 0.0, 0.0],
              ("Xposition", "Yposition", "Zposition", "Zrotation", "Xrotation", "Yrotation")),
        Joint("Spine", 0, [0.0, 10.0, 0.0], ("Zrotation", "Xrotation", "Yrotation")),
        Joint("Head", 1, [0.0, 5.0, 0.0], ("Zrotation", "Xrotation", "Yrotation")),
        Joint("LeftUpLeg", 0, [3.0, -8.0, 0.0], ("Zrotation", "Xrotation", "Yrotation")),
    ]


def tiny_clip(n_frames: int = 4, fps: float = 30.0, seed: int = 0) -> MotionClip:
    rng = np.random.default_rng(seed)
    skeleton = tiny_skeleton()
    channels = sum(len(j.channels) for j in skeleton)
    frames = rng.uniform(-45.0, 45.0, size=(n_frames, channels))
    return MotionClip(skeleton, fps, frames)


def reference_clip(n_frames: int = 6, fps: float = 15.0, seed: int = 0) -> MotionClip:
    """Random small rotations on the full 76-joint reference skeleton."""
    rng = np.random.default_rng(seed)
    skeleton = standard_skeleton()
    channels = sum(len(j.channels) for j in skeleton)
    frames = rng.uniform(-20.0, 20.0, size=(n_frames, channels))
    return MotionClip(skeleton, fps, frames)


@pytest.fixture
def clip():
    return tiny_clip()
