"""Distances and creativity measures over generated actions.

DTW runs in decoded radian space with a Euclidean frame distance and no
window constraint, so it shares units with the velocity filter. Novelty
is the resampled mean of minimum DTW distances from generated patterns
to the training set; diversity is the resampled mean pairwise DTW
distance among generated patterns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit, prange

from .codec import JointTrajectory
from .dataset import TrainingSet, TrainingStats
from .errors import DimensionMismatch, InsufficientPatterns

FLUCTUATING = "fluctuating"
NON_MOVING = "non-moving"
LEARNED = "appropriate-learned"
UNLEARNED = "appropriate-unlearned"
CLASSES = (UNLEARNED, LEARNED, FLUCTUATING, NON_MOVING)


@dataclass(frozen=True)
class DtwConfig:
    """Provenance record of the distance settings used in a report."""

    local_distance: str = "euclidean"
    window: Optional[str] = None


@dataclass(frozen=True)
class AppropriatenessRule:
    """Filter thresholds derived from the training data.

    velocity_limit: largest tolerated per-step joint change (radians).
    range_floor: per-joint movement required to count as 'moving';
    a pattern is non-moving only if every joint stays below its floor.
    """

    velocity_limit: float
    range_floor: np.ndarray

    def __post_init__(self):
        if self.velocity_limit <= 0:
            raise ValueError("velocity limit must be positive")


def rule_from_stats(
    stats: TrainingStats, velocity_factor: float = 1.5, floor_fraction: float = 0.05
) -> AppropriatenessRule:
    """Default rule: 150% of the training velocity maximum, 5% range floor."""
    return AppropriatenessRule(
        velocity_limit=velocity_factor * stats.max_step_velocity,
        range_floor=floor_fraction * stats.joint_range,
    )


@dataclass(frozen=True)
class PatternLabel:
    """Classification of one generated pattern."""

    kind: str
    nearest: Optional[str] = None
    min_dtw: Optional[float] = None

    def __post_init__(self):
        if self.kind not in CLASSES:
            raise ValueError(f"unknown class '{self.kind}'")
        appropriate = self.kind in (LEARNED, UNLEARNED)
        if appropriate != (self.nearest is not None) or appropriate != (self.min_dtw is not None):
            raise ValueError("nearest/min_dtw are present iff the pattern is appropriate")


@njit(cache=True)
def _dtw_pair(a, b):  # pragma: no cover - exercised through dtw_distance
    na, nb = a.shape[0], b.shape[0]
    dims = a.shape[1]
    table = np.empty((na, nb))
    for i in range(na):
        for j in range(nb):
            acc = 0.0
            for k in range(dims):
                diff = a[i, k] - b[j, k]
                acc += diff * diff
            cost = np.sqrt(acc)
            if i == 0 and j == 0:
                table[i, j] = cost
            elif i == 0:
                table[i, j] = table[i, j - 1] + cost
            elif j == 0:
                table[i, j] = table[i - 1, j] + cost
            else:
                table[i, j] = cost + min(min(table[i - 1, j], table[i, j - 1]), table[i - 1, j - 1])
    return table[na - 1, nb - 1]


@njit(cache=True, parallel=True)
def _dtw_many(batch, ref, out):  # pragma: no cover
    for n in prange(batch.shape[0]):
        out[n] = _dtw_pair(batch[n], ref)


def _as_frames(traj) -> np.ndarray:
    values = traj.values if isinstance(traj, JointTrajectory) else np.asarray(traj, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    if values.ndim != 2 or values.shape[0] < 1:
        raise DimensionMismatch(f"expected a (T, D) matrix, got shape {values.shape}")
    return np.ascontiguousarray(values, dtype=np.float64)


def dtw_distance(a, b) -> float:
    """Classic dynamic time warping distance between two trajectories."""
    fa, fb = _as_frames(a), _as_frames(b)
    if fa.shape[1] != fb.shape[1]:
        raise DimensionMismatch(f"joint counts differ: {fa.shape[1]} vs {fb.shape[1]}")
    return float(_dtw_pair(fa, fb))


def min_dtw_to_training(batch: np.ndarray, training: TrainingSet):
    """Minimum DTW distance and nearest-pattern index for a (N, T, D) batch."""
    batch = np.ascontiguousarray(batch, dtype=np.float64)
    best = np.full(batch.shape[0], np.inf)
    nearest = np.zeros(batch.shape[0], dtype=np.int64)
    out = np.empty(batch.shape[0])
    for p, traj in enumerate(training.trajectories()):
        _dtw_many(batch, np.ascontiguousarray(traj.values), out)
        closer = out < best
        best[closer] = out[closer]
        nearest[closer] = p
    return best, nearest


def default_learned_threshold(training: TrainingSet) -> float:
    """25% of the smallest pairwise DTW distance between training patterns."""
    trajs = training.trajectories()
    if len(trajs) < 2:
        raise InsufficientPatterns("need at least two training patterns")
    best = np.inf
    for i in range(len(trajs)):
        for j in range(i + 1, len(trajs)):
            best = min(best, dtw_distance(trajs[i], trajs[j]))
    return 0.25 * best


def classify_pattern(
    traj,
    rule: AppropriatenessRule,
    training: TrainingSet,
    learned_threshold: float,
) -> PatternLabel:
    """Assign exactly one of the four pattern classes."""
    values = _as_frames(traj)
    if values.shape[0] >= 2 and np.abs(np.diff(values, axis=0)).max() > rule.velocity_limit:
        return PatternLabel(kind=FLUCTUATING)
    spans = values.max(axis=0) - values.min(axis=0)
    if np.all(spans < rule.range_floor):
        return PatternLabel(kind=NON_MOVING)
    best, nearest = np.inf, None
    for label, ref in training.patterns:
        d = dtw_distance(values, ref)
        if d < best:
            best, nearest = d, label
    kind = LEARNED if best <= learned_threshold else UNLEARNED
    return PatternLabel(kind=kind, nearest=nearest, min_dtw=best)


def _sample_stats(n: int, iterations: int, sample_size: int, seed: int, score):
    """Resampled estimator: mean/stdev over iterations of score(indices)."""
    if sample_size > n:
        raise InsufficientPatterns(f"need at least {sample_size} patterns, have {n}")
    rng = np.random.default_rng(seed)
    means = np.empty(iterations)
    for it in range(iterations):
        idx = rng.choice(n, size=sample_size, replace=False)
        means[it] = score(np.sort(idx))
    return float(means.mean()), float(means.std())


def novelty_from_provider(
    n: int,
    provider,
    training: TrainingSet,
    iterations: int = 30,
    sample_size: int = 30,
    seed: int = 0,
):
    """Novelty where `provider(indices)` materializes sampled trajectories.

    The provider may return a uniform (N, T, D) batch or a list of
    (T_i, D) arrays.
    """

    def score(idx):
        batch = provider(idx)
        if isinstance(batch, np.ndarray) and batch.ndim == 3:
            best, _ = min_dtw_to_training(batch, training)
            return best.mean()
        refs = training.trajectories()
        return np.mean([min(dtw_distance(b, r) for r in refs) for b in batch])

    return _sample_stats(n, iterations, sample_size, seed, score)


def diversity_from_provider(
    n: int,
    provider,
    iterations: int = 30,
    sample_size: int = 30,
    seed: int = 0,
):
    """Diversity where `provider(indices)` materializes sampled trajectories."""
    if sample_size < 2:
        raise InsufficientPatterns("diversity needs a sample size of at least 2")

    def score(idx):
        batch = provider(idx)
        if isinstance(batch, np.ndarray) and batch.ndim == 3:
            total, count = 0.0, 0
            out = np.empty(batch.shape[0])
            for i in range(batch.shape[0] - 1):
                rest = batch[i + 1:]
                _dtw_many(rest, np.ascontiguousarray(batch[i]), out[: rest.shape[0]])
                total += out[: rest.shape[0]].sum()
                count += rest.shape[0]
            return total / count
        pairs = [
            dtw_distance(batch[i], batch[j])
            for i in range(len(batch))
            for j in range(i + 1, len(batch))
        ]
        return np.mean(pairs)

    return _sample_stats(n, iterations, sample_size, seed, score)


def _list_provider(generated):
    frames = [_as_frames(t) for t in generated]
    uniform = all(f.shape == frames[0].shape for f in frames)
    if uniform:
        stacked = np.stack(frames)

        def provider(idx):
            return stacked[idx]

    else:

        def provider(idx):
            return [frames[i] for i in idx]

    return provider, len(frames)


def novelty(generated, training: TrainingSet, iterations: int = 30,
            sample_size: int = 30, seed: int = 0):
    """Mean/stdev of min-DTW-to-training over seeded resamples."""
    provider, n = _list_provider(generated)
    return novelty_from_provider(n, provider, training, iterations, sample_size, seed)


def diversity(generated, iterations: int = 30, sample_size: int = 30, seed: int = 0):
    """Mean/stdev of pairwise DTW among generated patterns over resamples."""
    provider, n = _list_provider(generated)
    return diversity_from_provider(n, provider, iterations, sample_size, seed)
