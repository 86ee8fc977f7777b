"""Training loop, autoregressive synthesis and finite-difference checks.

Training alternates one discriminator update (binary cross-entropy on
ground truth vs detached generator output) with one generator update
(semantic-weighted reconstruction plus the non-saturating adversarial
term). The generator's fake score is recomputed after the discriminator
update so its gradient sees the current critic. Everything is seeded
and single-threaded, so a fixed seed reproduces the loss trajectory bit
for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import ndiff as nd
from ..errors import DataMismatchError, NumericError
from .config import CamnConfig
from .losses import adversarial_loss, discriminator_loss, reconstruction_loss, total_loss
from .model import CamnModel, Discriminator, GestureOutput, ModalityBatch


# -- synthetic corpus ---------------------------------------------------------

TOY_VOCAB = 20


def make_toy_word_table(config: CamnConfig, seed: int = 0, vocab: int = TOY_VOCAB) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, size=(vocab, config.word_dim))


def make_toy_corpus(
    config: CamnConfig, n_clips: int = 10, n_frames: int = 64, seed: int = 0
) -> list[ModalityBatch]:
    """Deterministic synthetic clips: word runs, sines for audio and face,
    and smooth low-amplitude pose targets around per-channel offsets."""
    rng = np.random.default_rng(seed + 1)
    # The pose targets are a corpus-wide offset plus a few shared motion
    # modes with per-clip amplitudes and phases. Both parts keep the
    # reconstruction gradient coherent across clips and fit through the
    # decoder's latent bottleneck, so a short optimization run can
    # actually reach them.
    n_modes = 4
    base = {
        "body": rng.uniform(-0.9, 0.9, size=config.body_channels),
        "hands": rng.uniform(-0.9, 0.9, size=config.hand_channels),
    }
    modes = {
        part: rng.uniform(-0.12, 0.12, size=(n_modes, base[part].shape[0]))
        for part in base
    }
    clips = []
    for ci in range(n_clips):
        word_ids = np.zeros(n_frames, dtype=np.int64)
        t = 0
        while t < n_frames:
            run = int(rng.integers(3, 10))
            word_ids[t:t + run] = int(rng.integers(0, TOY_VOCAB))
            t += run
        emotion_ids = np.full(n_frames, ci % config.n_emotions, dtype=np.int64)

        s = config.audio_samples_per_frame
        phase = rng.uniform(0, 2 * np.pi)
        freq = rng.uniform(0.01, 0.05)
        grid = np.arange(n_frames * s).reshape(n_frames, s)
        audio = 0.9 * np.sin(freq * grid + phase) + 0.02 * rng.standard_normal((n_frames, s))
        audio = np.clip(audio, -1.0, 1.0)

        frames = np.arange(n_frames)[:, None]
        blend_phase = rng.uniform(0, 2 * np.pi, size=config.blend_channels)
        blend_freq = rng.uniform(0.02, 0.2, size=config.blend_channels)
        blend = 0.5 + 0.5 * np.sin(frames * blend_freq + blend_phase)

        def poses(part: str) -> np.ndarray:
            amp = rng.uniform(0.6, 1.0, size=n_modes)
            freq = rng.uniform(0.5, 1.5, size=n_modes) * 2 * np.pi / n_frames
            phase = rng.uniform(0, 2 * np.pi, size=n_modes)
            waves = amp * np.sin(frames * freq + phase)  # (T, n_modes)
            return base[part] + waves @ modes[part]

        weights = rng.choice([0.8, 0.9, 1.0], size=n_frames)
        clips.append(
            ModalityBatch(
                word_ids=word_ids,
                speaker_id=ci % config.n_speakers,
                emotion_ids=emotion_ids,
                audio_frames=audio,
                blend=blend,
                target_body=poses("body"),
                target_hands=poses("hands"),
                weights=weights,
            )
        )
    return clips


# -- losses on one batch ------------------------------------------------------

def generator_loss(
    model: CamnModel, disc: Discriminator, batch: ModalityBatch
) -> tuple["nd.Tensor", GestureOutput, float, float]:
    """Total generator loss plus its pieces for one clip."""
    out = model.forward(batch)
    c = model.config
    l_rec = reconstruction_loss(
        nd.Tensor(batch.target_body), out.body,
        nd.Tensor(batch.target_hands), out.hands,
        c.hands_weight,
    )
    fake_score = disc(out.body, out.hands)
    l_adv = adversarial_loss(fake_score)
    weight_mean = float(batch.weights.mean())
    loss = total_loss(l_rec, l_adv, weight_mean, c.rec_weight, c.adv_weight)
    return loss, out, l_rec.item(), l_adv.item()


def _average(losses: list["nd.Tensor"]) -> "nd.Tensor":
    total = losses[0]
    for other in losses[1:]:
        total = nd.add(total, other)
    return nd.scale(total, 1.0 / len(losses))


# -- training -----------------------------------------------------------------

@dataclass
class TrainResult:
    g_losses: list[float] = field(default_factory=list)
    d_losses: list[float] = field(default_factory=list)

    @property
    def initial(self) -> float:
        return self.g_losses[0]

    @property
    def final(self) -> float:
        return self.g_losses[-1]


def train_step(
    model: CamnModel,
    disc: Discriminator,
    batches: list[ModalityBatch],
    g_state: "nd.AdamState",
    d_state: "nd.AdamState",
) -> tuple[float, float]:
    """One alternating update on a list of clips; returns (g_loss, d_loss)."""
    g_params = model.parameters()
    d_params = disc.parameters()

    outputs = [model.forward(b) for b in batches]

    # critic first: real vs detached fake
    d_terms = []
    for batch, out in zip(batches, outputs):
        real = disc(nd.Tensor(batch.target_body), nd.Tensor(batch.target_hands))
        fake = disc(out.body.detach(), out.hands.detach())
        d_terms.append(discriminator_loss(real, fake))
    d_loss = _average(d_terms)
    d_value = d_loss.item()
    if not np.isfinite(d_value):
        raise NumericError(f"discriminator loss became non-finite ({d_value})")
    nd.zero_grads(d_params)
    nd.zero_grads(g_params)
    nd.backward(d_loss)
    nd.adam_step(d_params, d_state)

    # generator against the updated critic
    g_terms = []
    for batch, out in zip(batches, outputs):
        c = model.config
        l_rec = reconstruction_loss(
            nd.Tensor(batch.target_body), out.body,
            nd.Tensor(batch.target_hands), out.hands,
            c.hands_weight,
        )
        l_adv = adversarial_loss(disc(out.body, out.hands))
        g_terms.append(
            total_loss(l_rec, l_adv, float(batch.weights.mean()), c.rec_weight, c.adv_weight)
        )
    g_loss = _average(g_terms)
    g_value = g_loss.item()
    if not np.isfinite(g_value):
        raise NumericError(f"generator loss became non-finite ({g_value})")
    nd.zero_grads(g_params)
    nd.zero_grads(d_params)
    nd.backward(g_loss)
    nd.adam_step(g_params, g_state)

    return g_value, d_value


def train(
    model: CamnModel,
    disc: Discriminator,
    corpus: list[ModalityBatch],
    steps: int,
    batch_size: int | None = None,
) -> TrainResult:
    """Round-robin over the corpus for a fixed number of alternating steps."""
    if not corpus:
        raise DataMismatchError("empty training corpus")
    if steps < 1:
        raise ValueError("steps must be positive")
    size = batch_size or 1
    lr = model.config.learning_rate
    g_state = nd.AdamState(lr=lr)
    d_state = nd.AdamState(lr=lr)
    result = TrainResult()
    cursor = 0
    for _ in range(steps):
        batches = [corpus[(cursor + i) % len(corpus)] for i in range(size)]
        cursor = (cursor + size) % len(corpus)
        try:
            g_value, d_value = train_step(model, disc, batches, g_state, d_state)
        except NumericError as exc:
            raise NumericError(f"step {len(result.g_losses)}: {exc}") from None
        result.g_losses.append(g_value)
        result.d_losses.append(d_value)
    return result


# -- synthesis ----------------------------------------------------------------

def synthesize(
    model: CamnModel,
    batch: ModalityBatch,
    seed_body: np.ndarray,
    seed_hands: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Autoregressive rollout: the first seed_frames outputs are the seed
    itself, later frames feed the model its own previous output."""
    c = model.config
    T = batch.n_frames
    seed_body = np.asarray(seed_body, dtype=np.float64)
    seed_hands = np.asarray(seed_hands, dtype=np.float64)
    k = c.seed_frames
    if T < k:
        raise DataMismatchError(f"need at least {k} frames, got {T}")
    if seed_body.shape != (k, c.body_channels):
        raise DataMismatchError(
            f"seed body must be ({k}, {c.body_channels}), got {seed_body.shape}"
        )
    if seed_hands.shape != (k, c.hand_channels):
        raise DataMismatchError(
            f"seed hands must be ({k}, {c.hand_channels}), got {seed_hands.shape}"
        )

    z_text, z_id, z_emotion, z_audio, z_face = model.encode_all(batch)
    streams = [z_text, z_id, z_emotion, z_audio, z_face]

    out_body = np.empty((T, c.body_channels), dtype=np.float64)
    out_hands = np.empty((T, c.hand_channels), dtype=np.float64)
    state_b = model.body_lstm.initial_state()
    state_h = model.hand_lstm.initial_state()

    for i in range(T):
        if i == 0:
            prev_b, prev_h = seed_body[0], seed_hands[0]
        elif i - 1 < k:
            prev_b, prev_h = seed_body[i - 1], seed_hands[i - 1]
        else:
            prev_b, prev_h = out_body[i - 1], out_hands[i - 1]
        rows = [nd.narrow(z, 0, i, i + 1) for z in streams]
        rows.append(nd.Tensor(prev_b[None, :]))
        rows.append(nd.Tensor(prev_h[None, :]))
        fused_i = nd.concat(rows, axis=1)
        h_b, state_b = model.body_lstm.step(fused_i, state_b)
        h_h, state_h = model.hand_lstm.step(nd.concat([fused_i, h_b], axis=1), state_h)
        if i < k:
            out_body[i] = seed_body[i]
            out_hands[i] = seed_hands[i]
        else:
            out_body[i] = model.body_head(h_b).data[0]
            out_hands[i] = model.hand_head(h_h).data[0]
    return out_body, out_hands


# -- modality sensitivity -------------------------------------------------------

DROPPABLE = ("text", "audio", "face", "emotion", "id", "semantic")


def modality_delta(
    model: CamnModel, disc: Discriminator, batch: ModalityBatch, drop: str
) -> float:
    """Largest output (or loss, for 'semantic') change when one input is
    replaced by a neutral stand-in. Nonzero means the wiring is live."""
    if drop not in DROPPABLE:
        raise ValueError(f"unknown modality {drop!r}; pick from {DROPPABLE}")
    base_out = model.forward(batch)
    if drop == "semantic":
        c = model.config
        l_rec = reconstruction_loss(
            nd.Tensor(batch.target_body), base_out.body,
            nd.Tensor(batch.target_hands), base_out.hands,
            c.hands_weight,
        )
        l_adv = adversarial_loss(disc(base_out.body, base_out.hands))
        with_w = total_loss(l_rec, l_adv, float(batch.weights.mean()), c.rec_weight, c.adv_weight)
        without = total_loss(l_rec, l_adv, 0.0, c.rec_weight, c.adv_weight)
        return abs(with_w.item() - without.item())

    changed = _replace_modality(model, batch, drop)
    alt_out = model.forward(changed)
    return float(
        max(
            np.abs(base_out.body.data - alt_out.body.data).max(),
            np.abs(base_out.hands.data - alt_out.hands.data).max(),
        )
    )


def _replace_modality(model: CamnModel, batch: ModalityBatch, drop: str) -> ModalityBatch:
    kw = dict(
        word_ids=batch.word_ids,
        speaker_id=batch.speaker_id,
        emotion_ids=batch.emotion_ids,
        audio_frames=batch.audio_frames,
        blend=batch.blend,
        target_body=batch.target_body,
        target_hands=batch.target_hands,
        weights=batch.weights,
    )
    if drop == "text":
        kw["word_ids"] = (batch.word_ids + 1) % model.word_table.shape[0]
    elif drop == "audio":
        kw["audio_frames"] = np.zeros_like(batch.audio_frames)
    elif drop == "face":
        kw["blend"] = np.zeros_like(batch.blend)
    elif drop == "emotion":
        kw["emotion_ids"] = (batch.emotion_ids + 1) % model.config.n_emotions
    elif drop == "id":
        kw["speaker_id"] = (batch.speaker_id + 1) % model.config.n_speakers
    return ModalityBatch(**kw)


# -- finite-difference verification ---------------------------------------------

def gradient_check(
    model: CamnModel,
    disc: Discriminator,
    batch: ModalityBatch,
    n_samples: int = 100,
    eps: float = 1e-4,
    seed: int = 0,
) -> float:
    """Compare analytic generator-loss gradients against central
    differences on randomly sampled parameters; returns the worst
    relative error."""
    params = {**model.parameters(), **disc.parameters()}
    nd.zero_grads(params)
    loss, _, _, _ = generator_loss(model, disc, batch)
    nd.backward(loss)
    grads = {name: (p.grad.copy() if p.grad is not None else np.zeros_like(p.data))
             for name, p in params.items()}

    rng = np.random.default_rng(seed)
    names = sorted(params)
    worst = 0.0
    for _ in range(n_samples):
        name = names[int(rng.integers(0, len(names)))]
        p = params[name]
        flat_index = int(rng.integers(0, p.data.size))
        idx = np.unravel_index(flat_index, p.data.shape)
        original = p.data[idx]

        p.data[idx] = original + eps
        plus, _, _, _ = generator_loss(model, disc, batch)
        p.data[idx] = original - eps
        minus, _, _, _ = generator_loss(model, disc, batch)
        p.data[idx] = original

        fd = (plus.item() - minus.item()) / (2.0 * eps)
        analytic = float(grads[name][idx])
        rel = abs(analytic - fd) / max(1e-8, abs(analytic) + abs(fd))
        worst = max(worst, rel)
    return worst
