"""The cascaded multi-modal gesture generator and its critic.

Five per-frame feature streams are encoded and fused: word vectors,
speaker identity, emotion labels, raw audio windows, and facial
blendshape weights. The cascade threads context forward: audio encoding
sees the text, emotion and id features; face encoding additionally sees
the audio. The fused vector, joined with the previous body and hand
pose, drives two stacked recurrent decoders, the hand decoder consuming
the body decoder's hidden states so hands can follow the arms.

Training runs teacher-forced (pose slots carry ground-truth previous
frames); synthesis feeds the model its own outputs after an 8-frame seed
that is passed through verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import ndiff as nd
from ..errors import DataMismatchError
from .config import CamnConfig


@dataclass
class ModalityBatch:
    """Aligned per-frame inputs and targets for one clip window.

    word_ids index the word table, emotion_ids the emotion set;
    audio_frames holds one window of raw samples per frame; blend the
    facial weights; target_* the ground-truth poses; weights the
    per-frame semantic scores used to scale the reconstruction loss.
    """

    word_ids: np.ndarray
    speaker_id: int
    emotion_ids: np.ndarray
    audio_frames: np.ndarray
    blend: np.ndarray
    target_body: np.ndarray
    target_hands: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.word_ids = np.asarray(self.word_ids, dtype=np.int64)
        self.emotion_ids = np.asarray(self.emotion_ids, dtype=np.int64)
        self.audio_frames = np.asarray(self.audio_frames, dtype=np.float64)
        self.blend = np.asarray(self.blend, dtype=np.float64)
        self.target_body = np.asarray(self.target_body, dtype=np.float64)
        self.target_hands = np.asarray(self.target_hands, dtype=np.float64)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        T = len(self.word_ids)
        for name in ("emotion_ids", "audio_frames", "blend", "target_body", "target_hands", "weights"):
            arr = getattr(self, name)
            if arr.shape[0] != T:
                raise DataMismatchError(f"{name} has {arr.shape[0]} frames, word_ids has {T}")
        if self.weights.size and (self.weights.min() < 0 or self.weights.max() > 1):
            raise DataMismatchError("weights must lie in [0, 1]")

    @property
    def n_frames(self) -> int:
        return len(self.word_ids)


@dataclass
class GestureOutput:
    body: "nd.Tensor"
    hands: "nd.Tensor"
    fused: "nd.Tensor"


class _Mlp2:
    """Two dense layers, leaky activation between them."""

    def __init__(self, in_dim: int, hidden: int, out_dim: int, rng, slope: float = 0.2):
        self.slope = slope
        self.first = nd.Linear(in_dim, hidden, rng)
        self.second = nd.Linear(hidden, out_dim, rng)

    def __call__(self, x):
        return self.second(nd.leaky_relu(self.first(x), self.slope))

    def params(self):
        for name, p in self.first.params():
            yield f"fc0.{name}", p
        for name, p in self.second.params():
            yield f"fc1.{name}", p


def _prefixed(prefix: str, layer) -> dict:
    return {f"{prefix}.{name}": p for name, p in layer.params()}


class CamnModel:
    """Generator: encoders, fusion and the stacked pose decoders."""

    def __init__(self, config: CamnConfig, word_table: np.ndarray, seed: int = 0):
        self.config = config
        word_table = np.asarray(word_table, dtype=np.float64)
        if word_table.ndim != 2 or word_table.shape[1] != config.word_dim:
            raise DataMismatchError(
                f"word table must be (V, {config.word_dim}), got {word_table.shape}"
            )
        self.word_table = word_table
        self.seed = seed
        rng = np.random.default_rng(seed)
        c = config

        self.text_encoder = nd.TemporalStack(
            c.word_dim, c.text_dim, c.text_layers, c.half_window, rng
        )
        self.id_embedding = nd.Embedding(c.n_speakers, c.id_dim, rng)
        self.emotion_embedding = nd.Embedding(c.n_emotions, c.emotion_dim, rng)
        self.emotion_encoder = nd.TemporalStack(
            c.emotion_dim, c.emotion_dim, c.emotion_layers, c.half_window, rng
        )
        self.audio_stack = nd.TemporalStack(
            c.audio_samples_per_frame, c.audio_dim, c.audio_layers, c.half_window, rng
        )
        cond = c.text_dim + c.emotion_dim + c.id_dim
        self.audio_head = _Mlp2(c.audio_dim + cond, c.audio_dim, c.audio_dim, rng)
        self.face_stack = nd.TemporalStack(
            c.blend_channels, c.face_dim, c.face_layers, c.half_window, rng
        )
        self.face_head = _Mlp2(c.face_dim + cond + c.audio_dim, c.face_dim, c.face_dim, rng)

        fused = c.fused_dim
        self.body_lstm = nd.LSTM(fused, c.body_latent, rng)
        self.body_head = _Mlp2(c.body_latent, c.body_latent, c.body_channels, rng)
        self.hand_lstm = nd.LSTM(fused + c.body_latent, c.hand_latent, rng)
        self.hand_head = _Mlp2(c.hand_latent, c.hand_latent, c.hand_channels, rng)

    # -- encoders ----------------------------------------------------------

    def encode_text(self, word_ids: np.ndarray) -> "nd.Tensor":
        vectors = self.word_table[np.asarray(word_ids, dtype=np.int64)]
        return self.text_encoder(nd.Tensor(vectors))

    def encode_id(self, speaker_id: int, n_frames: int) -> "nd.Tensor":
        if not 0 <= speaker_id < self.config.n_speakers:
            raise DataMismatchError(
                f"speaker id {speaker_id} outside [0, {self.config.n_speakers})"
            )
        row = self.id_embedding(np.asarray([speaker_id]))
        return nd.tile_rows(row, n_frames)

    def encode_emotion(self, emotion_ids: np.ndarray) -> "nd.Tensor":
        ids = np.asarray(emotion_ids, dtype=np.int64)
        if ids.size and (ids.min() < 0 or ids.max() >= self.config.n_emotions):
            raise DataMismatchError(
                f"emotion id outside [0, {self.config.n_emotions})"
            )
        return self.emotion_encoder(self.emotion_embedding(ids))

    def encode_audio(self, audio_frames: np.ndarray, z_text, z_emotion, z_id) -> "nd.Tensor":
        if audio_frames.shape[1] != self.config.audio_samples_per_frame:
            raise DataMismatchError(
                f"audio frames carry {audio_frames.shape[1]} samples, config says "
                f"{self.config.audio_samples_per_frame}"
            )
        h = self.audio_stack(nd.Tensor(audio_frames))
        return self.audio_head(nd.concat([h, z_text, z_emotion, z_id], axis=1))

    def encode_face(self, blend: np.ndarray, z_text, z_emotion, z_id, z_audio) -> "nd.Tensor":
        if blend.shape[1] != self.config.blend_channels:
            raise DataMismatchError(
                f"blendshape input has {blend.shape[1]} channels, config says "
                f"{self.config.blend_channels}"
            )
        h = self.face_stack(nd.Tensor(blend))
        return self.face_head(nd.concat([h, z_text, z_emotion, z_id, z_audio], axis=1))

    # -- fusion and decoding -------------------------------------------------

    def fuse(self, z_text, z_id, z_emotion, z_audio, z_face, prev_body, prev_hands) -> "nd.Tensor":
        parts = [z_text, z_id, z_emotion, z_audio, z_face, prev_body, prev_hands]
        fused = nd.concat(parts, axis=1)
        if fused.shape[1] != self.config.fused_dim:
            raise DataMismatchError(
                f"fused width {fused.shape[1]} != configured {self.config.fused_dim}"
            )
        return fused

    def decode(self, fused) -> tuple["nd.Tensor", "nd.Tensor"]:
        body_hidden = self.body_lstm(fused)
        body = self.body_head(body_hidden)
        hand_hidden = self.hand_lstm(nd.concat([fused, body_hidden], axis=1))
        hands = self.hand_head(hand_hidden)
        return body, hands

    def encode_all(self, batch: ModalityBatch):
        z_text = self.encode_text(batch.word_ids)
        z_id = self.encode_id(batch.speaker_id, batch.n_frames)
        z_emotion = self.encode_emotion(batch.emotion_ids)
        z_audio = self.encode_audio(batch.audio_frames, z_text, z_emotion, z_id)
        z_face = self.encode_face(batch.blend, z_text, z_emotion, z_id, z_audio)
        return z_text, z_id, z_emotion, z_audio, z_face

    def forward(self, batch: ModalityBatch) -> GestureOutput:
        """Teacher-forced pass: pose slots carry the previous target frame."""
        z_text, z_id, z_emotion, z_audio, z_face = self.encode_all(batch)
        prev_body = np.vstack([batch.target_body[:1], batch.target_body[:-1]])
        prev_hands = np.vstack([batch.target_hands[:1], batch.target_hands[:-1]])
        fused = self.fuse(
            z_text, z_id, z_emotion, z_audio, z_face,
            nd.Tensor(prev_body), nd.Tensor(prev_hands),
        )
        body, hands = self.decode(fused)
        return GestureOutput(body, hands, fused)

    def parameters(self) -> dict[str, "nd.Tensor"]:
        out: dict[str, nd.Tensor] = {}
        out.update(_prefixed("text", self.text_encoder))
        out.update(_prefixed("id", self.id_embedding))
        out.update(_prefixed("emotion.embed", self.emotion_embedding))
        out.update(_prefixed("emotion.stack", self.emotion_encoder))
        out.update(_prefixed("audio.stack", self.audio_stack))
        out.update(_prefixed("audio.head", self.audio_head))
        out.update(_prefixed("face.stack", self.face_stack))
        out.update(_prefixed("face.head", self.face_head))
        out.update(_prefixed("body.lstm", self.body_lstm))
        out.update(_prefixed("body.head", self.body_head))
        out.update(_prefixed("hand.lstm", self.hand_lstm))
        out.update(_prefixed("hand.head", self.hand_head))
        return out


class Discriminator:
    """Sequence-level critic: temporal convolutions, mean pool, one score."""

    def __init__(self, config: CamnConfig, seed: int = 0):
        rng = np.random.default_rng(seed)
        width = config.disc_width
        in_dim = config.body_channels + config.hand_channels
        self.layers = []
        for i, dilation in enumerate((1, 2, 4, 8)):
            self.layers.append(nd.Conv1d(in_dim if i == 0 else width, width, 3, dilation, rng))
        self.score_head = nd.Linear(width, 1, rng)

    def __call__(self, body, hands) -> "nd.Tensor":
        x = nd.concat([body, hands], axis=1)
        for conv in self.layers:
            x = nd.leaky_relu(conv(x), 0.2)
        # mean over time leaves a vector; lift it back to (1, width) for the head
        pooled = nd.reshape(nd.mean(x, axis=0), (1, -1))
        return nd.sigmoid(self.score_head(pooled))

    def parameters(self) -> dict[str, "nd.Tensor"]:
        out: dict[str, nd.Tensor] = {}
        for i, conv in enumerate(self.layers):
            for name, p in conv.params():
                out[f"disc.conv{i}.{name}"] = p
        for name, p in self.score_head.params():
            out[f"disc.score.{name}"] = p
        return out
