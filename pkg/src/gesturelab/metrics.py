"""Evaluation metrics for gesture synthesis.

Implemented here:

  pck            per-frame keypoint recall at a distance threshold
  srgr           semantic-weighted recall: sum(w_t * recall_t) / sum(w_t)
  l1_diversity   mean pairwise L1 distance over clips, pair-normalized by
                 1 / (2 N (N - 1)) over ordered pairs
  frechet_distance  |mu_r - mu_g|^2 + Tr(S_r + S_g - 2 (S_r S_g)^(1/2))
                 between Gaussian summaries of feature sets
  beat_align     mean over gesture beats of exp(-d^2 / (2 sigma^2)) where
                 d is the gap to the nearest audio beat

The matrix square root inside the Fréchet distance is evaluated through
a symmetric eigendecomposition of S_r^(1/2) S_g S_r^(1/2), which keeps
the product symmetric and the result real.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .annotation import ScoreTrack
from .beats import BeatSequence
from .errors import DataMismatchError, NumericError
from .skeleton import PositionTrack

log = logging.getLogger(__name__)

DEFAULT_PCK_DELTA = 2.0  # centimeters
DEFAULT_BEAT_SIGMA = 0.1  # seconds

_TRACE_NOISE_FLOOR = -1e-6


@dataclass
class ClipPair:
    """Matched ground-truth and generated clips plus per-frame weights."""

    truth: PositionTrack
    pred: PositionTrack
    weights: ScoreTrack

    def __post_init__(self):
        if self.truth.positions.shape != self.pred.positions.shape:
            raise DataMismatchError(
                f"truth {self.truth.positions.shape} and prediction "
                f"{self.pred.positions.shape} shapes differ"
            )
        if self.weights.n_frames != self.truth.n_frames:
            raise DataMismatchError(
                f"{self.weights.n_frames} weights for {self.truth.n_frames} frames"
            )
        if abs(self.truth.fps - self.pred.fps) > 1e-9 or abs(self.truth.fps - self.weights.fps) > 1e-9:
            raise DataMismatchError("clip pair members disagree on fps")


@dataclass
class GaussianStats:
    """Sample mean and covariance of a feature set."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.cov = np.asarray(self.cov, dtype=np.float64)
        d = self.mean.shape[0]
        if self.mean.ndim != 1 or self.cov.shape != (d, d):
            raise ValueError("mean must be (d,) and cov (d, d)")
        if not np.allclose(self.cov, self.cov.T, atol=1e-8):
            raise NumericError("covariance is not symmetric")


def _positions(track) -> np.ndarray:
    if isinstance(track, PositionTrack):
        return track.positions
    return np.asarray(track, dtype=np.float64)


def pck(truth, pred, delta: float = DEFAULT_PCK_DELTA) -> np.ndarray:
    """Per-frame fraction of joints within delta of the ground truth.

    The comparison is strict (< delta), so a joint exactly on the
    threshold does not count.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    a = _positions(truth)
    b = _positions(pred)
    if a.shape != b.shape:
        raise DataMismatchError(f"shapes {a.shape} and {b.shape} differ")
    dist = np.linalg.norm(a - b, axis=2)
    return (dist < delta).mean(axis=1)


def srgr(clips: Sequence[ClipPair], delta: float = DEFAULT_PCK_DELTA) -> float:
    """Semantic-relevant gesture recall over an evaluation set.

    Every frame of every clip contributes its keypoint recall weighted by
    its semantic score; the result is the weighted mean. All-zero
    weights are an error rather than a silent NaN.
    """
    if not clips:
        raise DataMismatchError("empty evaluation set")
    num = 0.0
    den = 0.0
    for pair in clips:
        recall = pck(pair.truth, pair.pred, delta)
        w = pair.weights.scores
        num += float(np.dot(w, recall))
        den += float(w.sum())
    if den <= 0.0:
        raise NumericError("all semantic weights are zero; the metric is undefined")
    return num / den


def l1_diversity(clips) -> float:
    """Mean pairwise L1 distance between clip feature vectors.

    clips is an (N, d) matrix or a list of equal-length 1-D vectors. The
    sum over ordered pairs is normalized by 2 N (N - 1), which equals the
    mean over unordered pairs divided by two.
    """
    x = np.asarray(clips, dtype=np.float64)
    if x.ndim != 2:
        raise DataMismatchError("expected an (N, d) feature matrix")
    n = x.shape[0]
    if n < 2:
        raise DataMismatchError(f"need at least 2 clips, got {n}")
    total = 0.0
    for i in range(n):
        total += np.abs(x[i] - x).sum()
    return total / (2.0 * n * (n - 1))


def center_crop_flatten(motions: Sequence[np.ndarray]) -> np.ndarray:
    """Crop motion matrices to the shortest length, centered, and flatten.

    Puts variable-length clips on a common footing for l1_diversity.
    """
    if not motions:
        raise DataMismatchError("no motion clips given")
    mats = [np.asarray(m, dtype=np.float64) for m in motions]
    if any(m.ndim != 2 for m in mats):
        raise DataMismatchError("each motion must be a (T, C) matrix")
    cols = {m.shape[1] for m in mats}
    if len(cols) != 1:
        raise DataMismatchError(f"motions disagree on channel count: {sorted(cols)}")
    t_min = min(m.shape[0] for m in mats)
    if t_min == 0:
        raise DataMismatchError("empty motion clip")
    rows = []
    for m in mats:
        lead = (m.shape[0] - t_min) // 2
        rows.append(m[lead:lead + t_min].reshape(-1))
    return np.stack(rows)


def gaussian_stats(features) -> GaussianStats:
    """Sample mean and unbiased covariance (symmetrized) of (N, d) features."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise DataMismatchError("expected an (N, d) feature matrix")
    n, d = x.shape
    if n < 2:
        raise DataMismatchError(f"need at least 2 samples for a covariance, got {n}")
    if not np.isfinite(x).all():
        raise NumericError("features contain non-finite values")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (n - 1)
    cov = 0.5 * (cov + cov.T)
    return GaussianStats(mean, cov)


def sqrtm_spd(m: np.ndarray) -> np.ndarray:
    """Principal square root of a symmetric PSD matrix via eigendecomposition.

    Slightly negative eigenvalues from roundoff are clamped to zero;
    materially non-symmetric input is rejected.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    scale = 1.0 + float(np.linalg.norm(m))
    asym = float(np.linalg.norm(m - m.T))
    if asym > 1e-8 * scale:
        raise NumericError(f"matrix is not symmetric (asymmetry {asym:.3g})")
    sym = 0.5 * (m + m.T)
    w, v = np.linalg.eigh(sym)
    w = np.maximum(w, 0.0)
    root = (v * np.sqrt(w)) @ v.T
    return 0.5 * (root + root.T)


def frechet_distance(r: GaussianStats, g: GaussianStats) -> float:
    """Fréchet distance between two Gaussian summaries.

    The cross term Tr((S_r S_g)^(1/2)) is computed as the trace of the
    square root of S_r^(1/2) S_g S_r^(1/2), which is symmetric PSD by
    construction. Small negative totals from roundoff are clamped to
    zero; anything beyond roundoff raises.
    """
    if r.mean.shape != g.mean.shape:
        raise DataMismatchError(
            f"feature dims differ: {r.mean.shape[0]} vs {g.mean.shape[0]}"
        )
    diff = r.mean - g.mean
    mean_term = float(diff @ diff)

    root_r = sqrtm_spd(r.cov)
    inner = root_r @ g.cov @ root_r
    cross = sqrtm_spd(0.5 * (inner + inner.T))
    trace_term = float(np.trace(r.cov) + np.trace(g.cov) - 2.0 * np.trace(cross))
    if trace_term < 0.0:
        if trace_term < _TRACE_NOISE_FLOOR * (1.0 + np.trace(r.cov) + np.trace(g.cov)):
            raise NumericError(f"trace term {trace_term:.3g} is negative beyond roundoff")
        log.debug("clamping negative trace noise %.3g to zero", trace_term)
        trace_term = 0.0
    return mean_term + trace_term


def fgd(real_features, gen_features) -> float:
    """Fréchet distance between feature clouds of real and generated data.

    Warns when either side has fewer samples than dimensions plus one,
    since the covariance is then rank-deficient.
    """
    real = np.asarray(real_features, dtype=np.float64)
    gen = np.asarray(gen_features, dtype=np.float64)
    for name, x in (("real", real), ("generated", gen)):
        if x.ndim != 2:
            raise DataMismatchError(f"{name} features must be an (N, d) matrix")
        if x.shape[0] < x.shape[1] + 1:
            warnings.warn(
                f"{name} set has {x.shape[0]} samples for {x.shape[1]} dims; "
                "covariance is rank-deficient",
                stacklevel=2,
            )
    if real.shape[1] != gen.shape[1]:
        raise DataMismatchError(
            f"feature dims differ: {real.shape[1]} vs {gen.shape[1]}"
        )
    return frechet_distance(gaussian_stats(real), gaussian_stats(gen))


def windowed_pca_features(
    real_motions: Sequence[np.ndarray],
    gen_motions: Sequence[np.ndarray],
    window: int = 30,
    stride: int = 10,
    dim: int = 16,
) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic motion features for fgd when no external net exists.

    Fixed-length windows are cut from each (T, C) motion, flattened, and
    projected onto the top principal components fitted on the real side
    only. Component signs are fixed so the largest-magnitude entry is
    positive, making the map reproducible.
    """
    if window < 1 or stride < 1 or dim < 1:
        raise ValueError("window, stride and dim must be positive")

    def cut(motions) -> np.ndarray:
        rows = []
        for m in motions:
            m = np.asarray(m, dtype=np.float64)
            if m.ndim != 2:
                raise DataMismatchError("each motion must be a (T, C) matrix")
            for start in range(0, m.shape[0] - window + 1, stride):
                rows.append(m[start:start + window].reshape(-1))
        if not rows:
            raise DataMismatchError(
                f"no motion windows; clips must span at least {window} frames"
            )
        return np.stack(rows)

    real_rows = cut(real_motions)
    gen_rows = cut(gen_motions)
    if real_rows.shape[0] < dim:
        raise DataMismatchError(
            f"{real_rows.shape[0]} real windows cannot support {dim} components"
        )
    center = real_rows.mean(axis=0)
    _, _, vt = np.linalg.svd(real_rows - center, full_matrices=False)
    comps = vt[:dim]
    signs = np.sign(comps[np.arange(dim), np.abs(comps).argmax(axis=1)])
    signs[signs == 0] = 1.0
    comps = comps * signs[:, None]
    return (real_rows - center) @ comps.T, (gen_rows - center) @ comps.T


def beat_align(
    gesture: BeatSequence, audio: BeatSequence, sigma: float = DEFAULT_BEAT_SIGMA
) -> float:
    """Mean Gaussian affinity from each gesture beat to its nearest audio beat.

    One-directional on purpose: unmatched audio beats do not hurt the
    score, missing gesture beats do.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    g = gesture.times if isinstance(gesture, BeatSequence) else np.asarray(gesture, dtype=np.float64)
    a = audio.times if isinstance(audio, BeatSequence) else np.asarray(audio, dtype=np.float64)
    if g.size == 0:
        raise DataMismatchError("no gesture beats; the score is undefined")
    if a.size == 0:
        raise DataMismatchError("no audio beats; the score is undefined")
    nearest = np.min(np.abs(g[:, None] - a[None, :]), axis=1)
    return float(np.mean(np.exp(-(nearest ** 2) / (2.0 * sigma ** 2))))


def metric_report(metric: str, value: float, params: dict, n: int) -> dict:
    """Normalized report payload shared by the command-line tools."""
    return {
        "metric": metric,
        "value": round_sig(value),
        "params": {k: round_sig(v) if isinstance(v, float) else v for k, v in sorted(params.items())},
        "n": n,
    }


def round_sig(value: float, digits: int = 6) -> float:
    """Round to a fixed number of significant digits for stable output."""
    if value == 0 or not np.isfinite(value):
        return float(value)
    return float(f"{value:.{digits}g}")
