"""Configuration for the cascaded multi-modal gesture network."""

from __future__ import annotations

from dataclasses import dataclass, asdict, replace


@dataclass(frozen=True)
class CamnConfig:
    """Dimensions and loss weights.

    The fused per-frame feature is the concatenation of the five encoder
    outputs with the previous body and hand pose, so fused_dim is always
    computed from the parts rather than stored (529 for the defaults
    below).
    """

    half_window: int = 32            # frames of context each side for the encoders
    word_dim: int = 300              # pretrained word-vector width
    text_dim: int = 128
    id_dim: int = 8
    emotion_dim: int = 8
    audio_dim: int = 128
    face_dim: int = 32
    body_latent: int = 256
    hand_latent: int = 256
    n_speakers: int = 30
    n_emotions: int = 8
    audio_samples_per_frame: int = 800
    blend_channels: int = 52
    body_channels: int = 81          # 27 body joints * 3 rotations
    hand_channels: int = 144         # 48 hand joints * 3 rotations
    seed_frames: int = 8
    text_layers: int = 8
    audio_layers: int = 12
    face_layers: int = 8
    emotion_layers: int = 4
    disc_width: int = 64
    hands_weight: float = 0.02       # alpha in the reconstruction loss
    rec_weight: float = 100.0        # beta applied to the semantic-scaled term
    adv_weight: float = 20.0
    learning_rate: float = 2e-4
    batch_size: int = 16

    @property
    def fused_dim(self) -> int:
        return (
            self.text_dim
            + self.id_dim
            + self.emotion_dim
            + self.audio_dim
            + self.face_dim
            + self.body_channels
            + self.hand_channels
        )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def toy(cls) -> "CamnConfig":
        """Desk-scale variant: latent widths divided by 8, short context."""
        return cls(
            half_window=4,
            word_dim=37,
            text_dim=16,
            id_dim=1,
            emotion_dim=1,
            audio_dim=16,
            face_dim=4,
            body_latent=32,
            hand_latent=32,
            audio_samples_per_frame=100,
            disc_width=8,
            batch_size=1,
        )


def config_from_dict(values: dict) -> CamnConfig:
    base = CamnConfig()
    known = set(base.to_dict())
    bad = sorted(set(values) - known)
    if bad:
        raise ValueError(f"unknown config field {bad[0]!r}")
    typed = {}
    for key, val in values.items():
        current = getattr(base, key)
        typed[key] = type(current)(val)
    return replace(base, **typed)
