"""Command-line front end.

    gesturelab [--config FILE] COMMAND ...

Commands:
    convert     motion/blendshape/audio format conversion and resampling
    beats       RMS-envelope audio beats or motion-velocity beats to CSV
    eval        srgr | fgd | beatalign | l1div metric reports as JSON
    stats       semantic-annotation histograms, per-word means, agreement
    camn        train | synthesize | ablate | gradcheck on the generator

Options can come from a config file (INI sections named after the
commands, a [camn] section for network dimensions); explicit flags win.
The GESTURELAB_CONFIG environment variable supplies a default config
path. Exit codes: 0 ok, 2 parse error, 3 data mismatch, 4 numeric
failure.

All floating-point output is rounded to 6 significant digits so repeated
runs with identical inputs emit identical bytes; the only timestamp
lives in the training manifest's "created" field.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import datetime
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import annotation as anno
from . import beats as beatsig
from . import camn
from . import metrics
from . import ndiff as nd
from .audio import downmix_resample, read_audio, write_wav
from .blendshapes import read_blendshapes, write_blendshapes
from .bvh import read_bvh, write_bvh
from .errors import DataMismatchError, NumericError, ParseError
from .kinematics import forward_kinematics
from .resample import resample
from .skeleton import MotionClip, PositionTrack, partition_indices, write_positions_csv
from .textgrid import read_textgrid, frame_words

ENV_CONFIG = "GESTURELAB_CONFIG"


# -- config file ----------------------------------------------------------------

class Conf:
    """Typed access to the INI config with per-command sections."""

    def __init__(self, path: str | None):
        self.parser = configparser.ConfigParser()
        if path:
            if not os.path.exists(path):
                raise ParseError("config file not found", path=path)
            try:
                self.parser.read(path)
            except configparser.Error as exc:
                raise ParseError(f"bad config file: {exc}", path=path) from None

    def get(self, section: str, key: str, cast, fallback):
        if not self.parser.has_option(section, key):
            return fallback
        raw = self.parser.get(section, key)
        if cast is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return cast(raw)

    def section(self, name: str) -> dict:
        if not self.parser.has_section(name):
            return {}
        return dict(self.parser.items(name))


def _pick(cli_value, conf: Conf, section: str, key: str, cast, default):
    if cli_value is not None:
        return cli_value
    return conf.get(section, key, cast, default)


# -- small readers and writers ----------------------------------------------------

def _read_matrix_csv(path) -> np.ndarray:
    """Numeric CSV (optional single header line) as a 2-D float array."""
    rows = []
    with open(path, newline="") as fh:
        for ln, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                if ln == 1:
                    continue  # header
                raise ParseError("non-numeric value", line=ln, path=str(path)) from None
    if not rows:
        raise ParseError("no numeric rows", path=str(path))
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ParseError(f"row has {len(r)} values, expected {width}",
                             line=i + 1, path=str(path))
    return np.array(rows, dtype=np.float64)


def _read_column_csv(path) -> np.ndarray:
    m = _read_matrix_csv(path)
    if m.shape[1] != 1:
        raise ParseError(f"expected a single column, found {m.shape[1]}", path=str(path))
    return m[:, 0]


def _write_beats_csv(times: np.ndarray, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time"])
        for t in times:
            w.writerow([f"{t:.10g}"])


def _read_positions_csv(path, fps: float) -> PositionTrack:
    """Inverse of write_positions_csv: (t, joint, x, y, z) rows."""
    frames: list[list[list[float]]] = []
    names: list[str] = []
    seen_t: str | None = None
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "joint", "x", "y", "z"]:
            raise ParseError("expected header t,joint,x,y,z", line=1, path=str(path))
        for ln, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise ParseError(f"expected 5 columns, found {len(row)}", line=ln, path=str(path))
            t, joint = row[0], row[1]
            try:
                xyz = [float(v) for v in row[2:]]
            except ValueError:
                raise ParseError("non-numeric position", line=ln, path=str(path)) from None
            if t != seen_t:
                frames.append([])
                seen_t = t
            if len(frames) == 1:
                names.append(joint)
            frames[-1].append(xyz)
    if not frames:
        raise ParseError("no position rows", path=str(path))
    width = len(frames[0])
    for i, f in enumerate(frames):
        if len(f) != width:
            raise DataMismatchError(
                f"{path}: frame {i} has {len(f)} joints, expected {width}"
            )
    return PositionTrack(fps, np.array(frames, dtype=np.float64), tuple(names))


def _emit_report(report: dict, out: str | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2)
    print(text)
    if out:
        Path(out).write_text(text + "\n")


# -- convert ----------------------------------------------------------------------

def cmd_convert(args, conf: Conf) -> int:
    fps = _pick(args.fps, conf, "convert", "fps", float, None)
    src = Path(args.infile)
    dst = Path(args.out) if args.out else None
    kind = src.suffix.lower()

    if kind == ".bvh":
        clip = read_bvh(src)
        if args.fk:
            track = forward_kinematics(clip, rotation_order=args.rotation_order)
            if dst is None or dst.suffix.lower() != ".csv":
                raise ValueError("--fk needs --out ending in .csv")
            write_positions_csv(track, dst)
            print(f"{src} -> {dst}: {track.n_frames} frames, {track.n_joints} joints")
            return 0
        if fps is not None:
            clip = resample(clip, fps)
        if dst is None:
            raise ValueError("--out is required")
        write_bvh(clip, dst)
        print(f"{src} -> {dst}: {clip.n_frames} frames at {clip.fps:g} fps, "
              f"{clip.channel_count} channels")
        return 0

    if kind == ".json":
        track = read_blendshapes(src)
        if fps is not None:
            track = resample(track, fps)
        if dst is None:
            raise ValueError("--out is required")
        write_blendshapes(track, dst)
        print(f"{src} -> {dst}: {track.weights.shape[0]} frames at {track.fps:g} fps")
        return 0

    if kind == ".wav":
        track = read_audio(src)
        if args.rate is not None:
            track = downmix_resample(track, args.rate)
        if dst is None:
            raise ValueError("--out is required")
        write_wav(track, dst, float32=args.float32)
        print(f"{src} -> {dst}: {track.n_samples} samples at {track.sample_rate} Hz, "
              f"{track.n_channels} channel(s)")
        return 0

    raise ValueError(f"unrecognized input format {kind!r}")


# -- beats ------------------------------------------------------------------------

def cmd_beats(args, conf: Conf) -> int:
    window = _pick(args.window, conf, "beats", "window", float, beatsig.DEFAULT_WINDOW)
    hop = _pick(args.hop, conf, "beats", "hop", float, beatsig.DEFAULT_HOP)
    threshold = _pick(args.threshold, conf, "beats", "threshold", float,
                      beatsig.DEFAULT_THRESHOLD)

    if (args.audio is None) == (args.motion is None):
        raise ValueError("pass exactly one of --audio or --motion")

    if args.audio:
        track = read_audio(args.audio)
        if track.n_channels > 1:
            track = downmix_resample(track, track.sample_rate)
        env = beatsig.rms_envelope(track, window=window, hop=hop)
        seq = beatsig.audio_beats(env, delta_threshold=threshold)
        source = args.audio
    else:
        clip = read_bvh(args.motion)
        positions = forward_kinematics(clip)
        velocity = beatsig.motion_velocity(positions, joints=args.joints)
        seq = beatsig.motion_beats(velocity, clip.fps)
        source = args.motion

    if args.out:
        _write_beats_csv(seq.times, args.out)
    print(f"{source}: {len(seq)} beats" + (f" -> {args.out}" if args.out else ""))
    return 0


# -- eval -------------------------------------------------------------------------

def cmd_eval(args, conf: Conf) -> int:
    metric = args.metric

    if metric == "srgr":
        delta = _pick(args.delta, conf, "eval", "delta", float, metrics.DEFAULT_PCK_DELTA)
        fps = _pick(args.fps, conf, "eval", "fps", float, 15.0)
        if not (len(args.truth) == len(args.pred) == len(args.weights)):
            raise DataMismatchError(
                f"{len(args.truth)} truth, {len(args.pred)} prediction and "
                f"{len(args.weights)} weight files do not form matched clips"
            )
        clips = []
        for t_path, p_path, w_path in zip(args.truth, args.pred, args.weights):
            truth = _read_positions_csv(t_path, fps)
            pred = _read_positions_csv(p_path, fps)
            weights = anno.ScoreTrack(fps, _read_column_csv(w_path))
            clips.append(metrics.ClipPair(truth, pred, weights))
        value = metrics.srgr(clips, delta=delta)
        report = metrics.metric_report("srgr", value, {"delta": delta}, len(clips))

    elif metric == "fgd":
        real = _read_matrix_csv(args.real)
        gen = _read_matrix_csv(args.gen)
        value = metrics.fgd(real, gen)
        report = metrics.metric_report(
            "fgd", value, {"dim": int(real.shape[1])}, int(real.shape[0]) + int(gen.shape[0])
        )

    elif metric == "beatalign":
        sigma = _pick(args.sigma, conf, "eval", "sigma", float, metrics.DEFAULT_BEAT_SIGMA)
        gesture = beatsig.BeatSequence(_read_column_csv(args.gesture))
        audio = beatsig.BeatSequence(_read_column_csv(args.audio))
        value = metrics.beat_align(gesture, audio, sigma=sigma)
        report = metrics.metric_report("beatalign", value, {"sigma": sigma}, len(gesture))

    elif metric == "l1div":
        feats = _read_matrix_csv(args.features)
        value = metrics.l1_diversity(feats)
        report = metrics.metric_report("l1div", value, {}, int(feats.shape[0]))

    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown metric {metric!r}")

    _emit_report(report, args.out)
    return 0


# -- stats ------------------------------------------------------------------------

def cmd_stats(args, conf: Conf) -> int:
    out_dir = _pick(args.out_dir, conf, "stats", "out_dir", str, None)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)

    if args.hist_counts:
        table = anno.semantic_agreement_table(_read_hist_counts(args.hist_counts))
        if out_dir:
            anno.write_agreement_csv(table, Path(out_dir) / "agreement.csv")
        for row in table.rows:
            print(f"score {row.score:.1f}: {row.count:g} frames, agreement {row.agreement:.6g}")
        print(f"average agreement including 0.0: {table.average_with_zero:.6g}")
        print(f"average agreement excluding 0.0: {table.average_without_zero:.6g}")
        return 0

    if not args.annotations:
        raise ValueError("pass annotation files or --hist-counts")
    fps = _pick(args.fps, conf, "stats", "fps", float, 15.0)
    transcript = read_textgrid(args.textgrid) if args.textgrid else None

    tracks = []
    framed: list[list[str]] | None = [] if transcript is not None else None
    for path in args.annotations:
        segments = anno.read_semantic_annotation(path)
        if transcript is None:
            raise ValueError("--textgrid is required to rasterize annotations")
        n_frames = args.frames or int(np.floor(transcript.duration * fps + 1e-9))
        track = anno.frame_semantic_scores(
            segments, transcript, fps, n_frames, segment_fallback=args.segment_fallback
        )
        tracks.append(track)
        framed.append(frame_words(transcript, fps, n_frames))

    stats = anno.semantic_stats(tracks, framed)

    if out_dir:
        anno.write_histogram_csv(stats, Path(out_dir) / "histogram.csv")
        anno.write_word_means_csv(stats, Path(out_dir) / "word_means.csv")
    print(f"{stats.total_frames} frames from {len(args.annotations)} annotator(s)")
    print(f"low-score fraction (<= 0.2): {stats.low_fraction:.3f}")
    return 0


def _read_hist_counts(path) -> dict[float, float]:
    """Two-column CSV score,count (header optional) into a histogram."""
    m = _read_matrix_csv(path)
    if m.shape[1] != 2:
        raise ParseError(f"expected score,count columns, found {m.shape[1]}", path=str(path))
    return {float(s): float(c) for s, c in m}


# -- camn -------------------------------------------------------------------------

def _camn_config(args, conf: Conf) -> camn.CamnConfig:
    overrides = conf.section("camn")
    if getattr(args, "toy", False):
        base = camn.CamnConfig.toy()
        if overrides:
            merged = base.to_dict()
            merged.update(overrides)
            return camn.config_from_dict(merged)
        return base
    if overrides:
        merged = camn.CamnConfig().to_dict()
        merged.update(overrides)
        return camn.config_from_dict(merged)
    return camn.CamnConfig()


def _build_models(config, seed: int):
    table = camn.make_toy_word_table(config, seed=seed)
    model = camn.CamnModel(config, table, seed=seed)
    disc = camn.Discriminator(config, seed=seed + 1)
    return model, disc


def cmd_camn_train(args, conf: Conf) -> int:
    if not args.toy:
        raise ValueError("only --toy training is wired; corpus loaders are out of scope")
    steps = _pick(args.steps, conf, "camn", "steps", int, 500)
    seed = _pick(args.seed, conf, "camn", "seed", int, 0)
    out_dir = Path(_pick(args.out_dir, conf, "camn", "out_dir", str, "runs/toy"))
    config = _camn_config(args, conf)

    model, disc = _build_models(config, seed)
    corpus = camn.make_toy_corpus(config, n_clips=args.clips, n_frames=args.length, seed=seed)
    result = camn.train(model, disc, corpus, steps, batch_size=config.batch_size)

    os.makedirs(out_dir, exist_ok=True)
    with open(out_dir / "loss_curve.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "g_loss", "d_loss"])
        for i, (g, d) in enumerate(zip(result.g_losses, result.d_losses)):
            w.writerow([i, f"{g:.10g}", f"{d:.10g}"])

    params = {f"gen.{k}": v for k, v in model.parameters().items()}
    params.update({f"disc.{k}": v for k, v in disc.parameters().items()})
    nd.save_checkpoint(params, out_dir / "checkpoint.json", seed=seed,
                       extra={"config": config.to_dict()})

    ratio = result.final / result.initial
    manifest = {
        "command": "camn train",
        "toy": bool(args.toy),
        "steps": steps,
        "seed": seed,
        "clips": args.clips,
        "frames_per_clip": args.length,
        "initial_loss": metrics.round_sig(result.initial),
        "final_loss": metrics.round_sig(result.final),
        "loss_ratio": metrics.round_sig(ratio),
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    print(f"trained {steps} steps: loss {result.initial:.6g} -> {result.final:.6g} "
          f"(ratio {ratio:.6g})")
    print(f"wrote {out_dir / 'loss_curve.csv'}, {out_dir / 'checkpoint.json'}, "
          f"{out_dir / 'manifest.json'}")
    return 0


def _neutral_batch(config, n_frames: int) -> camn.ModalityBatch:
    return camn.ModalityBatch(
        word_ids=np.zeros(n_frames, dtype=np.int64),
        speaker_id=0,
        emotion_ids=np.zeros(n_frames, dtype=np.int64),
        audio_frames=np.zeros((n_frames, config.audio_samples_per_frame)),
        blend=np.zeros((n_frames, config.blend_channels)),
        target_body=np.zeros((n_frames, config.body_channels)),
        target_hands=np.zeros((n_frames, config.hand_channels)),
        weights=np.ones(n_frames),
    )


def _pose_columns(clip: MotionClip) -> tuple[list[int], list[int]]:
    """Frame-matrix columns of the body and hand rotation channels."""
    offsets = clip.channel_offsets()
    names = clip.joint_names
    body_cols: list[int] = []
    for j in partition_indices(names, "body"):
        body_cols.extend(range(offsets[j], offsets[j] + 3))
    hand_cols: list[int] = []
    for j in partition_indices(names, "hands"):
        hand_cols.extend(range(offsets[j], offsets[j] + 3))
    return body_cols, hand_cols


def cmd_camn_synthesize(args, conf: Conf) -> int:
    seed = _pick(args.seed, conf, "camn", "seed", int, 0)
    config = _camn_config(args, conf)
    model, _ = _build_models(config, seed)

    if args.checkpoint:
        arrays, _ckpt_seed = nd.load_checkpoint(args.checkpoint)
        gen_arrays = {k[len("gen."):]: v for k, v in arrays.items() if k.startswith("gen.")}
        nd.apply_checkpoint(model.parameters(), gen_arrays or arrays)

    seed_clip = read_bvh(args.seed_pose)
    body_cols, hand_cols = _pose_columns(seed_clip)
    if len(body_cols) != config.body_channels or len(hand_cols) != config.hand_channels:
        raise DataMismatchError(
            f"seed skeleton provides {len(body_cols)} body and {len(hand_cols)} hand "
            f"channels; the model expects {config.body_channels} and {config.hand_channels}"
        )
    k = config.seed_frames
    if seed_clip.n_frames < k:
        raise DataMismatchError(
            f"seed pose has {seed_clip.n_frames} frames, need at least {k}"
        )
    n_frames = args.length
    if n_frames < k:
        raise DataMismatchError(f"--len {n_frames} is shorter than the {k} seed frames")

    batch = _neutral_batch(config, n_frames)
    seed_body = seed_clip.frames[:k, body_cols]
    seed_hands = seed_clip.frames[:k, hand_cols]
    body, hands = camn.synthesize(model, batch, seed_body, seed_hands)

    frames = np.zeros((n_frames, seed_clip.channel_count))
    carry = min(k, seed_clip.n_frames)
    frames[:carry] = seed_clip.frames[:carry]
    frames[carry:, :6] = seed_clip.frames[carry - 1, :6]  # hold the root
    frames[carry:, body_cols] = body[carry:]
    frames[carry:, hand_cols] = hands[carry:]
    out_clip = MotionClip(list(seed_clip.skeleton), seed_clip.fps, frames)

    out = args.out or "synthesized.bvh"
    write_bvh(out_clip, out)
    print(f"{out}: {n_frames} frames at {out_clip.fps:g} fps "
          f"(first {k} frames copied from {args.seed_pose})")
    return 0


def cmd_camn_ablate(args, conf: Conf) -> int:
    seed = _pick(args.seed, conf, "camn", "seed", int, 0)
    config = _camn_config(args, conf)
    model, disc = _build_models(config, seed)
    batch = camn.make_toy_corpus(config, n_clips=1, n_frames=args.length, seed=seed)[0]

    drops = [args.drop] if args.drop else list(camn.DROPPABLE)
    for drop in drops:
        delta = camn.modality_delta(model, disc, batch, drop)
        report = metrics.metric_report(f"ablate_{drop}", delta, {"seed": seed}, 1)
        print(json.dumps(report, sort_keys=True))
    return 0


def cmd_camn_gradcheck(args, conf: Conf) -> int:
    seed = _pick(args.seed, conf, "camn", "seed", int, 0)
    config = _camn_config(args, conf)
    model, disc = _build_models(config, seed)
    batch = camn.make_toy_corpus(config, n_clips=1, n_frames=args.length, seed=seed)[0]

    worst = camn.gradient_check(
        model, disc, batch, n_samples=args.samples, eps=args.eps, seed=seed
    )
    print(f"max relative gradient error: {worst:.6g} "
          f"({args.samples} parameters, eps {args.eps:g})")
    if worst >= args.threshold:
        raise NumericError(
            f"gradient check failed: {worst:.6g} exceeds threshold {args.threshold:g}"
        )
    return 0


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gesturelab", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config", default=None, help="INI config file "
                   f"(default: ${ENV_CONFIG} if set)")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("convert", help="convert or resample motion/blendshape/audio files")
    c.add_argument("--in", dest="infile", required=True)
    c.add_argument("--out", default=None)
    c.add_argument("--fps", type=float, default=None, help="target frame rate")
    c.add_argument("--rate", type=int, default=None, help="target audio sample rate")
    c.add_argument("--fk", action="store_true", help="emit global joint positions as CSV")
    c.add_argument("--rotation-order", default=None, help="override Euler order, e.g. ZXY")
    c.add_argument("--float32", action="store_true", help="write float WAV instead of PCM16")
    c.set_defaults(func=cmd_convert)

    b = sub.add_parser("beats", help="extract beat times to CSV")
    b.add_argument("--audio", default=None, help="WAV input")
    b.add_argument("--motion", default=None, help="BVH input")
    b.add_argument("--joints", default="body", choices=("body", "hands", "all"))
    b.add_argument("--window", type=float, default=None)
    b.add_argument("--hop", type=float, default=None)
    b.add_argument("--threshold", type=float, default=None)
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_beats)

    e = sub.add_parser("eval", help="metric reports as JSON")
    esub = e.add_subparsers(dest="metric", required=True)
    s = esub.add_parser("srgr")
    s.add_argument("--truth", nargs="+", required=True, help="positions CSVs")
    s.add_argument("--pred", nargs="+", required=True, help="positions CSVs")
    s.add_argument("--weights", nargs="+", required=True, help="per-frame weight CSVs")
    s.add_argument("--delta", type=float, default=None)
    s.add_argument("--fps", type=float, default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_eval)
    f = esub.add_parser("fgd")
    f.add_argument("--real", required=True, help="feature matrix CSV")
    f.add_argument("--gen", required=True, help="feature matrix CSV")
    f.add_argument("--out", default=None)
    f.set_defaults(func=cmd_eval)
    ba = esub.add_parser("beatalign")
    ba.add_argument("--gesture", required=True, help="beat-times CSV")
    ba.add_argument("--audio", required=True, help="beat-times CSV")
    ba.add_argument("--sigma", type=float, default=None)
    ba.add_argument("--out", default=None)
    ba.set_defaults(func=cmd_eval)
    l1 = esub.add_parser("l1div")
    l1.add_argument("--features", required=True, help="one row per clip")
    l1.add_argument("--out", default=None)
    l1.set_defaults(func=cmd_eval)

    st = sub.add_parser("stats", help="semantic-annotation statistics")
    st.add_argument("annotations", nargs="*", help="annotation text files")
    st.add_argument("--textgrid", default=None)
    st.add_argument("--fps", type=float, default=None)
    st.add_argument("--frames", type=int, default=None)
    st.add_argument("--segment-fallback", action="store_true",
                    help="use the segment score when no keyword covers a frame")
    st.add_argument("--hist-counts", default=None,
                    help="score,count CSV; emit the agreement table only")
    st.add_argument("--out-dir", default=None)
    st.set_defaults(func=cmd_stats)

    cm = sub.add_parser("camn", help="gesture-generator runs")
    csub = cm.add_subparsers(dest="subcommand", required=True)
    tr = csub.add_parser("train")
    tr.add_argument("--toy", action="store_true")
    tr.add_argument("--steps", type=int, default=None)
    tr.add_argument("--seed", type=int, default=None)
    tr.add_argument("--clips", type=int, default=10)
    tr.add_argument("--length", type=int, default=64, help="frames per synthetic clip")
    tr.add_argument("--out-dir", default=None)
    tr.set_defaults(func=cmd_camn_train)
    sy = csub.add_parser("synthesize")
    sy.add_argument("--toy", action="store_true")
    sy.add_argument("--seed-pose", required=True, help="BVH whose first frames seed the rollout")
    sy.add_argument("--len", dest="length", type=int, required=True)
    sy.add_argument("--checkpoint", default=None)
    sy.add_argument("--seed", type=int, default=None)
    sy.add_argument("--out", default=None)
    sy.set_defaults(func=cmd_camn_synthesize)
    ab = csub.add_parser("ablate")
    ab.add_argument("--toy", action="store_true")
    ab.add_argument("--drop", default=None, choices=camn.DROPPABLE)
    ab.add_argument("--length", type=int, default=32)
    ab.add_argument("--seed", type=int, default=None)
    ab.set_defaults(func=cmd_camn_ablate)
    gc = csub.add_parser("gradcheck")
    gc.add_argument("--toy", action="store_true")
    gc.add_argument("--samples", type=int, default=100)
    gc.add_argument("--eps", type=float, default=1e-4)
    gc.add_argument("--threshold", type=float, default=1e-3)
    gc.add_argument("--length", type=int, default=16)
    gc.add_argument("--seed", type=int, default=None)
    gc.set_defaults(func=cmd_camn_gradcheck)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config_path = args.config or os.environ.get(ENV_CONFIG) or None
    try:
        conf = Conf(config_path)
        return args.func(args, conf)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())
