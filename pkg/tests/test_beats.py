import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gesturelab.audio import AudioTrack
from gesturelab.beats import (
    BeatSequence,
    Envelope,
    audio_beats,
    motion_beats,
    motion_velocity,
    rms_envelope,
)
from gesturelab.errors import DataMismatchError
from gesturelab.skeleton import PositionTrack


def naive_rms(x, rate, window, hop):
    w = int(round(window * rate))
    out = []
    k = 0
    while True:
        start = int(np.floor(k * hop * rate))
        if start + w > len(x):
            break
        chunk = x[start : start + w]
        out.append(np.sqrt(np.mean(chunk * chunk)))
        k += 1
    return np.array(out)


def test_rms_matches_naive_loop():
    rng = np.random.default_rng(11)
    x = rng.normal(size=480)
    track = AudioTrack(1600.0, x[None, :])
    env = rms_envelope(track, window=0.05, hop=0.02)
    expected = naive_rms(x, 1600.0, 0.05, 0.02)
    assert env.hop == 0.02
    np.testing.assert_allclose(env.values, expected, atol=1e-12)


def test_rms_only_full_windows():
    # 100 samples at 1000 Hz, window 30 ms (30 samples), hop 25 ms (25
    # samples): starts 0, 25, 50 fit; start 75 would need sample 104
    track = AudioTrack(1000.0, np.ones((1, 100)))
    env = rms_envelope(track, window=0.03, hop=0.025)
    assert len(env.values) == 3
    np.testing.assert_allclose(env.values, 1.0)


def test_rms_short_signal_and_validation():
    track = AudioTrack(1000.0, np.ones((1, 10)))
    env = rms_envelope(track, window=0.05, hop=0.01)
    assert len(env.values) == 0
    stereo = AudioTrack(1000.0, np.ones((2, 100)))
    with pytest.raises(DataMismatchError, match="mono"):
        rms_envelope(stereo)
    with pytest.raises(ValueError, match="positive"):
        rms_envelope(track, window=0.0)
    with pytest.raises(ValueError, match="shorter than one sample"):
        rms_envelope(AudioTrack(10.0, np.ones((1, 50))), window=0.01)


def test_audio_beats_frozen_case():
    # rises = diff(values) = [0, 1, -1, 0.5, 0.5, -1]; positive rises at
    # j = 1 (1.0) and j = 3, 4 (plateau 0.5, earliest wins). With
    # threshold 0.3 the floor is 0.3, all three pass the floor but the
    # plateau resolves to j = 3 only.
    env = Envelope(0.1, [1.0, 1.0, 2.0, 1.0, 1.5, 2.0, 1.0])
    beats = audio_beats(env, delta_threshold=0.3)
    np.testing.assert_allclose(beats.times, [0.2, 0.4])


def test_audio_beats_threshold_prunes():
    env = Envelope(0.1, [0.0, 1.0, 0.0, 0.2, 0.0])
    strong = audio_beats(env, delta_threshold=0.3)
    np.testing.assert_allclose(strong.times, [0.1])
    lenient = audio_beats(env, delta_threshold=0.1)
    np.testing.assert_allclose(lenient.times, [0.1, 0.3])


def test_audio_beats_boundary_rises():
    # a rise in the last diff slot has no right neighbor and still counts
    env = Envelope(0.5, [0.0, 0.0, 1.0])
    beats = audio_beats(env)
    np.testing.assert_allclose(beats.times, [1.0])


def test_audio_beats_silence_and_validation():
    assert len(audio_beats(Envelope(0.1, [1.0, 1.0, 1.0]))) == 0
    assert len(audio_beats(Envelope(0.1, [3.0, 2.0, 1.0]))) == 0
    with pytest.raises(DataMismatchError, match="too short"):
        audio_beats(Envelope(0.1, [1.0]))
    with pytest.raises(ValueError, match="delta_threshold"):
        audio_beats(Envelope(0.1, [0.0, 1.0]), delta_threshold=0.0)
    with pytest.raises(ValueError, match="delta_threshold"):
        audio_beats(Envelope(0.1, [0.0, 1.0]), delta_threshold=1.5)


def test_beat_time_is_right_edge_of_rise():
    # the rise from value k to k+1 is reported at (k+1) * hop
    env = Envelope(0.25, [0.0, 0.0, 0.0, 5.0, 5.0])
    beats = audio_beats(env)
    np.testing.assert_allclose(beats.times, [3 * 0.25])


def make_positions(frames_xyz, names=("a", "b")):
    return PositionTrack(
        fps=10.0, positions=np.asarray(frames_xyz, dtype=float), joint_names=names
    )


def test_motion_velocity_oracle():
    # joint 0 moves 1 unit per frame in x, joint 1 is still
    pos = np.zeros((4, 2, 3))
    pos[:, 0, 0] = [0.0, 1.0, 2.0, 4.0]
    track = make_positions(pos)
    v = motion_velocity(track, joints="all")
    # per-frame mean step: [1, 1, 2] / 2 joints = [0.5, 0.5, 1.0], * fps
    np.testing.assert_allclose(v, [5.0, 5.0, 5.0, 10.0])
    assert v[0] == v[1]


def test_motion_velocity_joint_subsets():
    pos = np.zeros((3, 2, 3))
    pos[:, 0, 1] = [0.0, 2.0, 4.0]
    track = make_positions(pos)
    only_moving = motion_velocity(track, joints=[0])
    np.testing.assert_allclose(only_moving, 20.0)
    only_still = motion_velocity(track, joints=[1])
    np.testing.assert_allclose(only_still, 0.0)
    with pytest.raises(DataMismatchError, match="empty"):
        motion_velocity(track, joints=[])
    with pytest.raises(DataMismatchError, match="out of range"):
        motion_velocity(track, joints=[5])
    with pytest.raises(DataMismatchError, match="at least 2"):
        motion_velocity(make_positions(np.zeros((1, 2, 3))))


def test_motion_velocity_named_partitions():
    pos = np.zeros((3, 2, 3))
    pos[:, 0, 0] = [0.0, 1.0, 2.0]
    pos[:, 1, 0] = [0.0, 3.0, 6.0]
    track = PositionTrack(
        fps=10.0, positions=pos, joint_names=("Spine", "LeftHandIndex1")
    )
    v_body = motion_velocity(track, joints="body")
    np.testing.assert_allclose(v_body, 10.0)
    v_hands = motion_velocity(track, joints="hands")
    np.testing.assert_allclose(v_hands, 30.0)
    unnamed = PositionTrack(fps=10.0, positions=pos, joint_names=None)
    with pytest.raises(DataMismatchError, match="no joint names"):
        motion_velocity(unnamed, joints="body")
    v_all = motion_velocity(unnamed, joints="all")
    np.testing.assert_allclose(v_all, 20.0)


def test_motion_beats_minima():
    v = np.array([3.0, 2.0, 1.0, 2.0, 3.0, 1.0, 1.0, 3.0])
    beats = motion_beats(v, fps=10.0)
    # minima at t = 2 and the flat valley t = 5 (earliest frame only)
    np.testing.assert_allclose(beats.times, [0.2, 0.5])


def test_motion_beats_edges_excluded():
    v = np.array([0.0, 1.0, 0.0])
    beats = motion_beats(v, fps=10.0)
    # endpoints cannot be beats; the only interior frame is a peak
    assert len(beats) == 0


def test_motion_beats_validation():
    with pytest.raises(DataMismatchError, match="at least 3"):
        motion_beats(np.array([1.0, 0.0]), fps=10.0)
    with pytest.raises(ValueError, match="fps"):
        motion_beats(np.array([1.0, 0.0, 1.0]), fps=0.0)


def test_envelope_and_sequence_validation():
    with pytest.raises(ValueError, match="hop"):
        Envelope(0.0, [1.0])
    with pytest.raises(ValueError, match="non-negative"):
        Envelope(0.1, [-1.0])
    with pytest.raises(ValueError, match="increasing"):
        BeatSequence([0.0, 0.0])
    with pytest.raises(ValueError, match="non-negative"):
        BeatSequence([-1.0, 2.0])
    assert len(BeatSequence([])) == 0


@settings(max_examples=25, deadline=None)
@given(
    st.lists(st.floats(-1.0, 1.0), min_size=40, max_size=200),
    st.sampled_from([0.01, 0.02, 0.05]),
)
def test_rms_matches_naive_randomized(samples, hop):
    x = np.array(samples)
    track = AudioTrack(1000.0, x[None, :])
    env = rms_envelope(track, window=0.02, hop=hop)
    np.testing.assert_allclose(
        env.values, naive_rms(x, 1000.0, 0.02, hop), atol=1e-12
    )


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.0, 5.0), min_size=3, max_size=60), st.floats(0.05, 1.0))
def test_audio_beats_are_thresholded_local_maxima(values, threshold):
    env = Envelope(0.1, values)
    beats = audio_beats(env, delta_threshold=threshold)
    rises = np.maximum(np.diff(env.values), 0.0)
    if rises.max() <= 0:
        assert len(beats) == 0
        return
    floor = threshold * rises.max()
    for t in beats.times:
        j = int(round(t / 0.1)) - 1
        assert rises[j] >= floor
        assert rises[j] > 0
        if j > 0:
            assert rises[j] > rises[j - 1]
        if j + 1 < len(rises):
            assert rises[j] >= rises[j + 1]
