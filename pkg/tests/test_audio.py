import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gesturelab.audio import AudioTrack, downmix_resample, frame_audio, read_audio, write_wav
from gesturelab.errors import DataMismatchError, ParseError


def pcm16_wav(rate: int, channels: np.ndarray) -> bytes:
    """Hand-assembled RIFF/WAVE with interleaved 16-bit PCM."""
    data = (np.clip(channels, -1, 1) * 32767).round().astype("<i2").T.tobytes()
    n_ch = channels.shape[0]
    fmt = struct.pack("<HHIIHH", 1, n_ch, rate, rate * n_ch * 2, n_ch * 2, 16)
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt
    body += b"data" + struct.pack("<I", len(data)) + data
    return b"RIFF" + struct.pack("<I", len(body)) + body


def test_parse_pcm16_mono():
    x = np.array([[0.0, 0.5, -0.5, 1.0]])
    track = read_audio(pcm16_wav(16000, x))
    assert track.sample_rate == 16000
    assert track.samples.shape == (1, 4)
    np.testing.assert_allclose(track.samples[0], (x[0] * 32767).round() / 32768, atol=1e-9)


def test_parse_stereo():
    x = np.vstack([np.linspace(-0.4, 0.4, 6), np.linspace(0.4, -0.4, 6)])
    track = read_audio(pcm16_wav(8000, x))
    assert track.samples.shape == (2, 6)
    np.testing.assert_allclose(track.samples, (x * 32767).round() / 32768, atol=1e-9)


def test_bad_magic_rejected():
    with pytest.raises(ParseError):
        read_audio(b"RIFX" + b"\x00" * 40)
    with pytest.raises(ParseError):
        read_audio(b"RIFF" + struct.pack("<I", 4) + b"WAVX")


def test_truncated_data_rejected():
    blob = pcm16_wav(8000, np.zeros((1, 10)))
    with pytest.raises(ParseError) as err:
        read_audio(blob[:-6])
    assert "truncat" in str(err.value).lower()


def test_unsupported_codec_rejected():
    blob = bytearray(pcm16_wav(8000, np.zeros((1, 4))))
    i = blob.index(b"fmt ") + 8
    blob[i:i + 2] = struct.pack("<H", 7)  # mu-law
    with pytest.raises(ParseError) as err:
        read_audio(bytes(blob))
    assert "codec" in str(err.value).lower() or "unsupported" in str(err.value).lower()


def test_pcm16_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.uniform(-0.99, 0.99, 2000)
    path = tmp_path / "a.wav"
    write_wav(AudioTrack(16000, x), path)
    back = read_audio(path)
    assert back.sample_rate == 16000
    np.testing.assert_allclose(back.samples[0], x, atol=1.0 / 32768)


def test_pcm16_round_trip_is_idempotent(tmp_path):
    rng = np.random.default_rng(1)
    x = rng.uniform(-1, 1, 500)
    p1, p2 = tmp_path / "a.wav", tmp_path / "b.wav"
    write_wav(AudioTrack(8000, x), p1)
    once = read_audio(p1)
    write_wav(once, p2)
    twice = read_audio(p2)
    np.testing.assert_array_equal(once.samples, twice.samples)


def test_float32_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    x = rng.uniform(-1, 1, 300).astype(np.float32).astype(np.float64)
    path = tmp_path / "f.wav"
    write_wav(AudioTrack(22050, x), path, float32=True)
    back = read_audio(path)
    np.testing.assert_array_equal(back.samples[0], x)


def test_downmix_averages_channels():
    left = np.array([1.0, 0.0, -1.0, 0.5])
    right = np.array([0.0, 0.0, 1.0, 0.5])
    track = AudioTrack(100, np.vstack([left, right]))
    mono = downmix_resample(track, 100)
    assert mono.samples.shape == (1, 4)
    np.testing.assert_allclose(mono.samples[0], [0.5, 0.0, 0.0, 0.5])


def test_downmix_resample_halves():
    x = np.arange(10, dtype=np.float64) / 10
    out = downmix_resample(AudioTrack(100, x), 50)
    assert out.sample_rate == 50
    np.testing.assert_allclose(out.samples[0], x[::2])


def test_frame_audio_windows_and_padding():
    x = np.arange(100, dtype=np.float64)
    track = AudioTrack(100, x)
    frames = frame_audio(track, fps=10.0, samples_per_frame=12, n_frames=10)
    assert frames.shape == (10, 12)
    np.testing.assert_array_equal(frames[0], np.arange(12))
    np.testing.assert_array_equal(frames[5], np.arange(50, 62))
    # the last window runs past the signal and is zero padded
    np.testing.assert_array_equal(frames[9, :10], np.arange(90, 100))
    np.testing.assert_array_equal(frames[9, 10:], [0.0, 0.0])


def test_frame_audio_needs_mono():
    track = AudioTrack(100, np.zeros((2, 50)))
    with pytest.raises(DataMismatchError):
        frame_audio(track, 10.0, 10, 5)


def test_whole_frame_check():
    blob = pcm16_wav(8000, np.zeros((2, 4)))
    i = blob.index(b"data")
    cut = blob[: i + 8 + 6]  # 6 bytes is not a whole stereo frame
    patched = bytearray(cut)
    patched[i + 4:i + 8] = struct.pack("<I", 6)
    with pytest.raises(ParseError):
        read_audio(bytes(patched))


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 400), st.sampled_from([8000, 16000, 44100]))
def test_round_trip_any_length(tmp_path_factory, n, rate):
    rng = np.random.default_rng(n)
    x = rng.uniform(-1, 1, n)
    path = tmp_path_factory.mktemp("wav") / "x.wav"
    write_wav(AudioTrack(rate, x), path)
    back = read_audio(path)
    assert back.n_samples == n
    np.testing.assert_allclose(back.samples[0], x, atol=1.0 / 32768)
