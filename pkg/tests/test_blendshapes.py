import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gesturelab.blendshapes import (
    BLENDSHAPE_NAMES,
    BlendshapeTrack,
    parse_blendshapes,
    write_blendshapes,
)
from gesturelab.errors import ParseError


def make_doc(n_frames=4, fps=60, seed=0):
    rng = np.random.default_rng(seed)
    return {
        "fps": fps,
        "channels": {
            n: rng.uniform(0.0, 1.0, size=n_frames).tolist() for n in BLENDSHAPE_NAMES
        },
    }


def test_canonical_names():
    assert len(BLENDSHAPE_NAMES) == 52
    assert len(set(BLENDSHAPE_NAMES)) == 52
    assert "jawOpen" in BLENDSHAPE_NAMES
    assert "tongueOut" in BLENDSHAPE_NAMES


def test_parse_reorders_to_canonical():
    doc = make_doc(n_frames=3)
    # feed the channels in reversed insertion order
    doc["channels"] = dict(reversed(list(doc["channels"].items())))
    track = parse_blendshapes(json.dumps(doc))
    assert track.names == BLENDSHAPE_NAMES
    assert track.weights.shape == (3, 52)
    col = BLENDSHAPE_NAMES.index("jawOpen")
    np.testing.assert_allclose(track.weights[:, col], doc["channels"]["jawOpen"])


def test_clamp_counts_and_warns():
    doc = make_doc(n_frames=2)
    doc["channels"]["jawOpen"] = [1.5, -0.25]
    doc["channels"]["cheekPuff"] = [0.5, 2.0]
    with pytest.warns(UserWarning, match="clamped 3"):
        track = parse_blendshapes(doc)
    assert track.n_clamped == 3
    col = BLENDSHAPE_NAMES.index("jawOpen")
    np.testing.assert_array_equal(track.weights[:, col], [1.0, 0.0])


def test_unknown_channel():
    doc = make_doc()
    doc["channels"]["eyebrowWiggle"] = [0.0] * 4
    with pytest.raises(ParseError, match="unknown blendshape channel 'eyebrowWiggle'"):
        parse_blendshapes(doc)


def test_missing_channel():
    doc = make_doc()
    del doc["channels"]["mouthPucker"]
    with pytest.raises(ParseError, match="missing blendshape channel 'mouthPucker'"):
        parse_blendshapes(doc)


def test_ragged_channels():
    doc = make_doc(n_frames=4)
    doc["channels"]["tongueOut"] = [0.1, 0.2]
    with pytest.raises(ParseError, match="ragged"):
        parse_blendshapes(doc)


def test_bad_fps_and_missing_fields():
    with pytest.raises(ParseError, match="missing 'fps'"):
        parse_blendshapes({"channels": {}})
    with pytest.raises(ParseError, match="fps must be positive"):
        parse_blendshapes({"fps": 0, "channels": {}})
    with pytest.raises(ParseError, match="fps must be a number"):
        parse_blendshapes({"fps": "fast", "channels": {}})
    doc = make_doc()
    del doc["channels"]
    with pytest.raises(ParseError, match="missing 'channels'"):
        parse_blendshapes(doc)
    with pytest.raises(ParseError, match="invalid JSON"):
        parse_blendshapes("{not json")
    with pytest.raises(ParseError, match="JSON object"):
        parse_blendshapes("[1, 2]")


def test_non_finite_rejected():
    doc = make_doc(n_frames=2)
    doc["channels"]["jawOpen"] = [0.5, float("nan")]
    with pytest.raises(ParseError, match="finite"):
        parse_blendshapes(doc)


def test_round_trip():
    doc = make_doc(n_frames=5, seed=3)
    track = parse_blendshapes(doc)
    back = parse_blendshapes(write_blendshapes(track))
    assert back.fps == track.fps
    np.testing.assert_array_equal(back.weights, track.weights)


def test_track_validation():
    with pytest.raises(ValueError, match="fps"):
        BlendshapeTrack(0.0, BLENDSHAPE_NAMES, np.zeros((1, 52)))
    with pytest.raises(ValueError, match="shape"):
        BlendshapeTrack(60.0, BLENDSHAPE_NAMES, np.zeros((1, 51)))
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        BlendshapeTrack(60.0, BLENDSHAPE_NAMES, np.full((1, 52), 1.5))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 12), st.integers(0, 2**32 - 1))
def test_round_trip_randomized(n_frames, seed):
    doc = make_doc(n_frames=n_frames, seed=seed)
    track = parse_blendshapes(doc)
    back = parse_blendshapes(write_blendshapes(track))
    assert back.n_frames == n_frames
    np.testing.assert_array_equal(back.weights, track.weights)
