"""WAV audio input, downmixing and sample-rate conversion.

Only the two encodings that occur in this corpus are supported: 16-bit
integer PCM and 32-bit float PCM. The reader walks RIFF chunks itself so
that truncated files and unsupported codecs produce precise errors
instead of whatever a generic loader would say. Samples are normalized
to [-1, 1] (int16 divided by 32768).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import DataMismatchError, ParseError

_PCM_INT = 1
_PCM_FLOAT = 3


@dataclass
class AudioTrack:
    """Multichannel audio: samples has shape (channels, n)."""

    sample_rate: int
    samples: np.ndarray

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample rate must be positive")
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim == 1:
            self.samples = self.samples[None, :]
        if self.samples.ndim != 2:
            raise ValueError("samples must have shape (channels, n)")

    @property
    def n_channels(self) -> int:
        return self.samples.shape[0]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    @property
    def duration(self) -> float:
        return self.n_samples / self.sample_rate


def read_audio(source) -> AudioTrack:
    """Read a WAV file from bytes or a path."""
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    else:
        with open(source, "rb") as fh:
            data = fh.read()

    if len(data) < 12:
        raise ParseError("truncated file: shorter than a RIFF header")
    if data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise ParseError("not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos:pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8:pos + 8 + size]
        if cid == b"fmt ":
            if len(body) < 16:
                raise ParseError("truncated file: fmt chunk too short")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data":
            if len(body) < size:
                raise ParseError(
                    f"truncated file: data chunk declares {size} bytes, {len(body)} present"
                )
            payload = body
        pos += 8 + size + (size & 1)

    if fmt is None:
        raise ParseError("missing fmt chunk")
    if payload is None:
        raise ParseError("missing data chunk")

    tag, n_channels, rate, _, block_align, bits = fmt
    if n_channels < 1:
        raise ParseError(f"invalid channel count {n_channels}")
    if (tag, bits) == (_PCM_INT, 16):
        raw = np.frombuffer(payload[: len(payload) - len(payload) % 2], dtype="<i2")
        values = raw.astype(np.float64) / 32768.0
    elif (tag, bits) == (_PCM_FLOAT, 32):
        raw = np.frombuffer(payload[: len(payload) - len(payload) % 4], dtype="<f4")
        values = np.clip(raw.astype(np.float64), -1.0, 1.0)
    else:
        raise ParseError(f"unsupported codec: format tag {tag}, {bits} bits per sample")

    if len(values) % n_channels != 0:
        raise ParseError("truncated file: sample data is not a whole number of frames")
    frames = values.reshape(-1, n_channels)
    return AudioTrack(int(rate), frames.T.copy())


def write_wav(track: AudioTrack, path, float32: bool = False) -> None:
    """Write a track back out, 16-bit PCM by default."""
    frames = track.samples.T
    if float32:
        payload = frames.astype("<f4").tobytes()
        tag, bits = _PCM_FLOAT, 32
    else:
        quantized = np.clip(np.round(frames * 32768.0), -32768, 32767)
        payload = quantized.astype("<i2").tobytes()
        tag, bits = _PCM_INT, 16
    n_channels = track.n_channels
    block = n_channels * bits // 8
    rate = int(round(track.sample_rate))
    fmt = struct.pack("<HHIIHH", tag, n_channels, rate, rate * block, block, bits)
    body = b"fmt " + struct.pack("<I", len(fmt)) + fmt
    body += b"data" + struct.pack("<I", len(payload)) + payload
    with open(path, "wb") as fh:
        fh.write(b"RIFF" + struct.pack("<I", 4 + len(body)) + b"WAVE" + body)


def downmix_resample(track: AudioTrack, target_rate: int) -> AudioTrack:
    """Average the channels to mono, then linearly resample.

    Output sample i is the source signal evaluated at i * src / target in
    source-sample units; the output covers every such point inside the
    source.
    """
    if target_rate <= 0:
        raise ValueError("target rate must be positive")
    if track.n_samples == 0:
        raise DataMismatchError("cannot resample an empty track")
    mono = track.samples.mean(axis=0)
    if target_rate == track.sample_rate:
        return AudioTrack(target_rate, mono.copy())

    ratio = track.sample_rate / target_rate
    n = track.n_samples
    n_out = int(np.floor((n - 1) / ratio)) + 1
    pos = np.arange(n_out) * ratio
    lo = np.floor(pos).astype(int)
    hi = np.minimum(lo + 1, n - 1)
    frac = pos - lo
    out = (1.0 - frac) * mono[lo] + frac * mono[hi]
    return AudioTrack(target_rate, out)


def frame_audio(track: AudioTrack, fps: float, samples_per_frame: int, n_frames: int) -> np.ndarray:
    """Cut a mono track into per-frame windows, shape (n_frames, s).

    Window i starts at the sample nearest i * rate / fps and is zero
    padded past the end of the signal.
    """
    if track.n_channels != 1:
        raise DataMismatchError("frame_audio expects a mono track; downmix first")
    if samples_per_frame <= 0 or fps <= 0 or n_frames < 0:
        raise ValueError("fps, samples_per_frame and n_frames must be positive")
    mono = track.samples[0]
    hop = track.sample_rate / fps
    out = np.zeros((n_frames, samples_per_frame), dtype=np.float64)
    for i in range(n_frames):
        start = int(round(i * hop))
        stop = min(start + samples_per_frame, len(mono))
        if start < len(mono):
            out[i, : stop - start] = mono[start:stop]
    return out
