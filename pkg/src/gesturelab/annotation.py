"""Semantic gesture annotations and annotator-agreement statistics.

Annotation files are plain text, one segment per line:

    start end segment_score [word:score ...]

Times are seconds, scores multiples of 0.1 in [0, 1], and the keyword
list names the transcript words inside the segment that carry meaning.
Lines starting with '#' and blank lines are skipped. A frame's semantic
score is the product of its segment's score and the keyword score of the
word aligned at the frame midpoint; frames under no keyword score zero
(or inherit the bare segment score when segment_fallback is set).
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DataMismatchError, ParseError
from .textgrid import AlignedTranscript, PAD_TOKEN

EMOTIONS = (
    "neutral", "anger", "happiness", "fear",
    "disgust", "sadness", "contempt", "surprise",
)


@dataclass
class SemanticSegment:
    start: float
    end: float
    segment_score: float
    keywords: list[tuple[str, float]] = field(default_factory=list)

    def __post_init__(self):
        if self.end <= self.start:
            raise ValueError(f"segment end {self.end} <= start {self.start}")
        if not 0.0 <= self.segment_score <= 1.0:
            raise ValueError(f"segment score {self.segment_score} outside [0, 1]")
        for word, score in self.keywords:
            if not 0.0 <= score <= 1.0:
                raise ValueError(f"keyword {word!r} score {score} outside [0, 1]")


@dataclass
class ScoreTrack:
    """Frame-level semantic scores in [0, 1]."""

    fps: float
    scores: np.ndarray

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.scores.ndim != 1:
            raise ValueError("scores must be a 1-D array")
        if self.scores.size and (self.scores.min() < 0.0 or self.scores.max() > 1.0):
            raise ValueError("scores must lie in [0, 1]")

    @property
    def n_frames(self) -> int:
        return self.scores.shape[0]


@dataclass
class EmotionTrack:
    """Frame-level emotion category ids."""

    fps: float
    labels: np.ndarray

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.labels.ndim != 1:
            raise ValueError("labels must be a 1-D array")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= len(EMOTIONS)):
            raise ValueError(f"labels must lie in [0, {len(EMOTIONS) - 1}]")

    @property
    def n_frames(self) -> int:
        return self.labels.shape[0]


def parse_semantic_annotation(text: str) -> list[SemanticSegment]:
    segments: list[SemanticSegment] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if len(toks) < 3:
            raise ParseError("segment line needs 'start end score'", line=ln)
        try:
            start, end, seg_score = float(toks[0]), float(toks[1]), float(toks[2])
        except ValueError:
            raise ParseError(f"expected numbers, found {toks[:3]}", line=ln) from None
        keywords = []
        for tok in toks[3:]:
            if ":" not in tok:
                raise ParseError(f"keyword {tok!r} must look like word:score", line=ln)
            word, _, s = tok.rpartition(":")
            try:
                kw_score = float(s)
            except ValueError:
                raise ParseError(f"keyword score {s!r} is not a number", line=ln) from None
            keywords.append((word, kw_score))
        try:
            segments.append(SemanticSegment(start, end, seg_score, keywords))
        except ValueError as exc:
            raise ParseError(str(exc), line=ln) from None
    segments.sort(key=lambda s: s.start)
    return segments


def read_semantic_annotation(path) -> list[SemanticSegment]:
    with open(path, "r") as fh:
        return parse_semantic_annotation(fh.read())


def frame_semantic_scores(
    segments: list[SemanticSegment],
    transcript: AlignedTranscript,
    fps: float,
    n_frames: int,
    segment_fallback: bool = False,
) -> ScoreTrack:
    """Rasterize segment annotations to per-frame scores.

    Frame i is attributed to the segment and word interval containing its
    midpoint (i + 0.5) / fps, both half-open. Keywords that never occur
    in the transcript inside their segment draw a warning and are
    ignored.
    """
    if fps <= 0:
        raise ValueError("fps must be positive")

    for seg in segments:
        present = {
            e.token
            for e in transcript.entries
            if e.start < seg.end and e.end > seg.start and e.token != PAD_TOKEN
        }
        for word, _ in seg.keywords:
            if word not in present:
                warnings.warn(
                    f"keyword {word!r} does not occur in the transcript within "
                    f"[{seg.start}, {seg.end}); ignored",
                    stacklevel=2,
                )

    scores = np.zeros(n_frames, dtype=np.float64)
    for i in range(n_frames):
        mid = (i + 0.5) / fps
        seg = next((s for s in segments if s.start <= mid < s.end), None)
        if seg is None:
            continue
        word = None
        for e in transcript.entries:
            if e.start <= mid < e.end:
                word = e.token
                break
        kw_score = None
        if word is not None and word != PAD_TOKEN:
            for kw, s in seg.keywords:
                if kw == word:
                    kw_score = s
                    break
        if kw_score is not None:
            scores[i] = seg.segment_score * kw_score
        elif segment_fallback:
            scores[i] = seg.segment_score
    return ScoreTrack(fps, scores)


def average_annotators(tracks: list[ScoreTrack]) -> ScoreTrack:
    """Elementwise mean of binary annotator tracks."""
    if not tracks:
        raise DataMismatchError("no annotator tracks given")
    n = tracks[0].n_frames
    fps = tracks[0].fps
    for i, t in enumerate(tracks):
        if t.n_frames != n:
            raise DataMismatchError(
                f"annotator {i} has {t.n_frames} frames, annotator 0 has {n}"
            )
        if abs(t.fps - fps) > 1e-9:
            raise DataMismatchError("annotator tracks disagree on fps")
        vals = np.unique(t.scores)
        if not np.all(np.isin(vals, (0.0, 1.0))):
            raise ValueError(f"annotator {i} track is not binary")
    stacked = np.stack([t.scores for t in tracks])
    return ScoreTrack(fps, stacked.mean(axis=0))


def emotion_agreement(a: EmotionTrack, b: EmotionTrack) -> float:
    """Fraction of frames on which two emotion tracks agree."""
    if a.n_frames != b.n_frames:
        raise DataMismatchError(
            f"tracks have {a.n_frames} and {b.n_frames} frames"
        )
    if a.n_frames == 0:
        raise DataMismatchError("empty emotion tracks")
    return float(np.mean(a.labels == b.labels))


@dataclass
class AgreementRow:
    score: float
    count: float
    agreement: float
    weighted: float


@dataclass
class AgreementTable:
    rows: list[AgreementRow]
    average_with_zero: float
    average_without_zero: float


def semantic_agreement_table(histogram: dict[float, float]) -> AgreementTable:
    """Annotator-consistency summary from a score histogram.

    The keys are the 11 legal score values (multiples of 0.1); the values
    are frame counts. A mean label s implies a fraction max(s, 1 - s) of
    annotators on the majority side, which serves as the per-bucket
    agreement. Two weighted averages are returned because the 0.0 bucket
    (frames nobody marked) dominates the mass: one including it, one
    without it.
    """
    if not histogram:
        raise DataMismatchError("empty histogram")
    rows = []
    for score in sorted(histogram):
        snapped = round(score * 10) / 10
        if abs(score - snapped) > 1e-9 or not 0.0 <= score <= 1.0:
            raise ValueError(f"score {score} is not a multiple of 0.1 in [0, 1]")
        count = float(histogram[score])
        if count < 0:
            raise ValueError(f"negative count for score {score}")
        agreement = max(snapped, 1.0 - snapped)
        rows.append(AgreementRow(snapped, count, agreement, count * agreement))

    total = sum(r.count for r in rows)
    if total <= 0:
        raise DataMismatchError("histogram has no mass")
    avg_all = sum(r.weighted for r in rows) / total
    nz = [r for r in rows if r.score > 0.0]
    nz_total = sum(r.count for r in nz)
    avg_nz = sum(r.weighted for r in nz) / nz_total if nz_total > 0 else float("nan")
    return AgreementTable(rows, avg_all, avg_nz)


@dataclass
class SemanticStats:
    histogram: np.ndarray          # counts over ten 0.1-wide buckets, last closed
    total_frames: int
    low_fraction: float            # share of frames scoring at most 0.2
    word_means: dict[str, tuple[float, int]]


def semantic_stats(
    tracks: list[ScoreTrack], framed_words: list[list[str]] | None = None
) -> SemanticStats:
    """Score distribution and, when word frames are given, per-word means.

    framed_words must align with tracks clip by clip and frame by frame;
    PAD frames are excluded from the per-word table.
    """
    if not tracks:
        raise DataMismatchError("no score tracks given")
    if framed_words is not None and len(framed_words) != len(tracks):
        raise DataMismatchError(
            f"{len(framed_words)} word lists for {len(tracks)} score tracks"
        )

    hist = np.zeros(10, dtype=np.int64)
    total = 0
    low = 0
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}

    for ci, track in enumerate(tracks):
        scores = track.scores
        total += len(scores)
        # the epsilon keeps boundary values like 0.3 (whose float product
        # 0.3 * 10 lands just under 3) in their intended bucket
        buckets = np.minimum(np.floor(scores * 10 + 1e-9).astype(int), 9)
        np.add.at(hist, buckets, 1)
        low += int(np.count_nonzero(scores <= 0.2 + 1e-12))
        if framed_words is not None:
            words = framed_words[ci]
            if len(words) != len(scores):
                raise DataMismatchError(
                    f"clip {ci}: {len(words)} word frames for {len(scores)} score frames"
                )
            for w, s in zip(words, scores):
                if w == PAD_TOKEN:
                    continue
                sums[w] = sums.get(w, 0.0) + float(s)
                counts[w] = counts.get(w, 0) + 1

    if total == 0:
        raise DataMismatchError("score tracks are empty")
    word_means = {w: (sums[w] / counts[w], counts[w]) for w in sorted(sums)}
    return SemanticStats(hist, total, low / total, word_means)


def write_histogram_csv(stats: SemanticStats, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bucket_low", "bucket_high", "n_frames", "fraction"])
        for i, n in enumerate(stats.histogram):
            w.writerow(
                [f"{i / 10:.1f}", f"{(i + 1) / 10:.1f}", int(n), f"{n / stats.total_frames:.6g}"]
            )


def write_word_means_csv(stats: SemanticStats, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["word", "mean_score", "n_frames"])
        for word, (mean, n) in stats.word_means.items():
            w.writerow([word, f"{mean:.6g}", n])


def write_agreement_csv(table: AgreementTable, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["score", "n_frames", "agreement", "weighted"])
        for r in table.rows:
            w.writerow([f"{r.score:.1f}", f"{r.count:.6g}", f"{r.agreement:.6g}", f"{r.weighted:.6g}"])
        w.writerow(["average_with_zero", "", f"{table.average_with_zero:.6g}", ""])
        w.writerow(["average_without_zero", "", f"{table.average_without_zero:.6g}", ""])
