"""Grid sweep of the action-memory space, reports, and map rendering.

A sweep lays a regular grid over [-1, 1]^2, generates one closed-loop
action per grid point from the shared home posture, classifies it, and
aggregates a report (class percentages, novelty/diversity, per-pattern
region sizes). Cells stream to a JSON-lines record file; trajectories
are regenerated on demand (deterministically) rather than stored, which
keeps peak memory flat for large grids.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .codec import decode_array, encode_frame
from .dataset import TrainingSet
from .errors import InsufficientPatterns, ParseError
from .metrics import (
    CLASSES,
    FLUCTUATING,
    LEARNED,
    NON_MOVING,
    UNLEARNED,
    DtwConfig,
    diversity_from_provider,
    default_learned_threshold,
    min_dtw_to_training,
    novelty_from_provider,
    rule_from_stats,
)
from .network import generate_batch
from .trainer import Checkpoint

# Map colors: one hue per training pattern (assigned in label order),
# purple for fluctuating cells, pink for non-moving cells.
PATTERN_COLORS = (
    (31, 119, 180),
    (255, 127, 14),
    (44, 160, 44),
    (214, 39, 40),
    (140, 86, 75),
    (23, 190, 207),
)
FLUCTUATING_COLOR = (128, 0, 160)
NON_MOVING_COLOR = (255, 150, 200)


@dataclass(frozen=True)
class GridSpec:
    """Regular grid over the latent square, endpoints included."""

    resolution: int = 200
    low: float = -1.0
    high: float = 1.0

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("grid resolution must be at least 2")
        if not self.low < self.high:
            raise ValueError("grid bounds must be ordered")

    @property
    def cells(self) -> int:
        return self.resolution**2

    def axis(self) -> np.ndarray:
        return np.linspace(self.low, self.high, self.resolution)


def pb_grid(spec: GridSpec) -> np.ndarray:
    """All grid points in row-major order: index iy * resolution + ix,
    with component 0 (x) varying fastest. Shape (resolution^2, 2)."""
    axis = spec.axis()
    xs, ys = np.meshgrid(axis, axis)  # ys constant along rows
    return np.column_stack([xs.ravel(), ys.ravel()])


@dataclass(frozen=True)
class CellRecord:
    """Classification of one grid cell."""

    ix: int
    iy: int
    pb: tuple
    kind: str
    nearest: Optional[str]
    min_dtw: Optional[float]

    def to_json(self) -> str:
        return json.dumps(
            {
                "ix": self.ix,
                "iy": self.iy,
                "pb": list(self.pb),
                "class": self.kind,
                "nearest": self.nearest,
                "min_dtw": self.min_dtw,
            }
        )


@dataclass
class SweepResult:
    """Cells in grid order plus the aggregated report."""

    grid: GridSpec
    cells: list
    report: dict


@dataclass(frozen=True)
class MapImage:
    """RGB map of the sweep; row 0 is the top of the image (iy = res - 1)."""

    pixels: np.ndarray
    legend: dict


def write_records(cells, path) -> None:
    with open(path, "w") as f:
        for cell in cells:
            f.write(cell.to_json())
            f.write("\n")


def read_records(path):
    """Load a record file; returns (resolution, cells in grid order)."""
    cells = []
    try:
        with open(path, encoding="utf-8") as f:
            for line_no, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    doc = json.loads(line)
                    cells.append(
                        CellRecord(
                            ix=int(doc["ix"]),
                            iy=int(doc["iy"]),
                            pb=tuple(doc["pb"]),
                            kind=str(doc["class"]),
                            nearest=doc["nearest"],
                            min_dtw=doc["min_dtw"],
                        )
                    )
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise ParseError(f"'{path}' line {line_no}: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"cannot read record file '{path}': {exc}") from exc
    resolution = int(round(np.sqrt(len(cells))))
    if resolution**2 != len(cells):
        raise ParseError(f"record file has {len(cells)} cells, not a square grid")
    return resolution, cells


def home_input(checkpoint: Checkpoint) -> np.ndarray:
    """Encoded home posture, the initial frame of every generation run."""
    return encode_frame(checkpoint.stats.home, checkpoint.codec)


def _decode_batch(preds: np.ndarray, checkpoint: Checkpoint) -> np.ndarray:
    b, steps, width = preds.shape
    flat = decode_array(preds.reshape(b * steps, width), checkpoint.codec)
    return flat.reshape(b, steps, checkpoint.spec.d)


def regenerate(checkpoint: Checkpoint, pb_points: np.ndarray, steps: int) -> np.ndarray:
    """Closed-loop trajectories for the given latent points, (B, steps, D)."""
    preds = generate_batch(checkpoint.params, pb_points, steps, home_input(checkpoint))
    return _decode_batch(preds, checkpoint)


def sweep(
    checkpoint: Checkpoint,
    grid: GridSpec,
    steps: Optional[int] = None,
    *,
    seed: int = 0,
    chunk_size: int = 4096,
    record_path=None,
    iterations: int = 30,
    sample_size: int = 30,
    pool: str = "appropriate",
    learned_threshold: Optional[float] = None,
    velocity_factor: float = 1.5,
    floor_fraction: float = 0.05,
    progress=None,
) -> SweepResult:
    """Generate, classify and summarize one action per grid cell."""
    training = checkpoint.training_set
    rule = rule_from_stats(checkpoint.stats, velocity_factor, floor_fraction)
    threshold = (
        default_learned_threshold(training) if learned_threshold is None else learned_threshold
    )
    if steps is None:
        steps = checkpoint.stats.max_steps
    points = pb_grid(grid)
    res = grid.resolution

    cells = []
    for start in range(0, len(points), chunk_size):
        batch_points = points[start:start + chunk_size]
        trajs = regenerate(checkpoint, batch_points, steps)
        speeds = np.abs(np.diff(trajs, axis=1)).max(axis=(1, 2))
        spans = trajs.max(axis=1) - trajs.min(axis=1)
        fluct = speeds > rule.velocity_limit
        still = ~fluct & np.all(spans < rule.range_floor, axis=1)
        keep = ~fluct & ~still
        dists = np.full(len(batch_points), np.nan)
        nearest_idx = np.zeros(len(batch_points), dtype=np.int64)
        if np.any(keep):
            dists[keep], nearest_idx[keep] = min_dtw_to_training(trajs[keep], training)
        for offset in range(len(batch_points)):
            flat = start + offset
            ix, iy = flat % res, flat // res
            if fluct[offset]:
                kind, near, dist = FLUCTUATING, None, None
            elif still[offset]:
                kind, near, dist = NON_MOVING, None, None
            else:
                dist = float(dists[offset])
                near = training.labels[nearest_idx[offset]]
                kind = LEARNED if dist <= threshold else UNLEARNED
            cells.append(
                CellRecord(
                    ix=ix,
                    iy=iy,
                    pb=(float(points[flat, 0]), float(points[flat, 1])),
                    kind=kind,
                    nearest=near,
                    min_dtw=dist,
                )
            )
        if progress is not None:
            progress(min(start + chunk_size, len(points)), len(points))

    if record_path is not None:
        write_records(cells, record_path)

    report = summarize_cells(
        cells,
        checkpoint,
        steps=steps,
        seed=seed,
        iterations=iterations,
        sample_size=sample_size,
        pool=pool,
        learned_threshold=threshold,
        rule=rule,
    )
    return SweepResult(grid=grid, cells=cells, report=report)


def summarize_cells(
    cells,
    checkpoint: Checkpoint,
    *,
    steps: int,
    seed: int = 0,
    iterations: int = 30,
    sample_size: int = 30,
    pool: str = "appropriate",
    learned_threshold: Optional[float] = None,
    rule=None,
) -> dict:
    """Aggregate a cell list into the per-sweep report.

    Novelty/diversity sample from the configured pool ('appropriate' or
    'all') and regenerate the sampled trajectories from the checkpoint,
    so the report is a pure function of (cells, checkpoint, settings).
    """
    training = checkpoint.training_set
    if rule is None:
        rule = rule_from_stats(checkpoint.stats)
    if learned_threshold is None:
        learned_threshold = default_learned_threshold(training)
    total = len(cells)
    counts = {kind: 0 for kind in CLASSES}
    regions = {label: 0 for label in training.labels}
    for cell in cells:
        counts[cell.kind] += 1
        if cell.nearest is not None:
            regions[cell.nearest] += 1

    if pool == "all":
        pool_cells = list(cells)
    elif pool == "appropriate":
        pool_cells = [c for c in cells if c.kind in (LEARNED, UNLEARNED)]
    else:
        raise ValueError("pool must be 'appropriate' or 'all'")

    cache = {}

    def provider(idx):
        missing = [i for i in idx if i not in cache]
        if missing:
            pts = np.array([pool_cells[i].pb for i in missing])
            for i, traj in zip(missing, regenerate(checkpoint, pts, steps)):
                cache[i] = traj
        return np.stack([cache[i] for i in idx])

    try:
        nov = novelty_from_provider(
            len(pool_cells), provider, training, iterations, sample_size, seed
        )
        div = diversity_from_provider(
            len(pool_cells), provider, iterations, sample_size, seed
        )
        novelty_stats = {"mean": nov[0], "stdev": nov[1]}
        diversity_stats = {"mean": div[0], "stdev": div[1]}
    except InsufficientPatterns:
        novelty_stats = None
        diversity_stats = None

    appropriate = counts[LEARNED] + counts[UNLEARNED]
    pct = {kind: 100.0 * counts[kind] / total for kind in CLASSES}
    return {
        "cells_total": total,
        "counts": counts,
        "percentages": pct,
        "appropriate_pct": 100.0 * appropriate / total,
        "learned_fraction_of_appropriate": (counts[LEARNED] / appropriate) if appropriate else None,
        "novelty": novelty_stats,
        "diversity": diversity_stats,
        "region_cells": regions,
        "settings": {
            "steps": steps,
            "seed": seed,
            "iterations": iterations,
            "sample_size": sample_size,
            "pool": pool,
            "learned_threshold": learned_threshold,
            "velocity_limit": rule.velocity_limit,
            "range_floor": rule.range_floor.tolist(),
            "gamma": checkpoint.config.gamma,
            "dtw": vars(DtwConfig()),
        },
    }


def summarize(result: SweepResult) -> dict:
    return result.report


def render_map(result_or_cells, labels, learned_threshold: float) -> MapImage:
    """Color cells by nearest pattern (brightness falls off with min DTW,
    clipped at 4x the learned threshold); purple/pink for filtered cells."""
    if isinstance(result_or_cells, SweepResult):
        cells = result_or_cells.cells
    else:
        cells = result_or_cells
    res = int(round(np.sqrt(len(cells))))
    if res**2 != len(cells):
        raise ValueError("cell list is not a square grid")
    colors = {label: PATTERN_COLORS[i % len(PATTERN_COLORS)] for i, label in enumerate(labels)}
    pixels = np.zeros((res, res, 3), dtype=np.uint8)
    clip = 4.0 * learned_threshold
    for cell in cells:
        if cell.kind == FLUCTUATING:
            rgb = FLUCTUATING_COLOR
        elif cell.kind == NON_MOVING:
            rgb = NON_MOVING_COLOR
        else:
            base = colors[cell.nearest]
            sim = 1.0 - min(cell.min_dtw, clip) / clip
            scale = 0.30 + 0.70 * sim
            rgb = tuple(int(round(c * scale)) for c in base)
        # image row 0 at the top: latent y axis points up
        pixels[res - 1 - cell.iy, cell.ix] = rgb
    legend = {
        "patterns": {label: list(colors[label]) for label in labels},
        "fluctuating": list(FLUCTUATING_COLOR),
        "non_moving": list(NON_MOVING_COLOR),
        "brightness": f"linear in min DTW, clipped at {clip!r}",
        "axes": {"x": "latent dim 1, -1 left to +1 right",
                 "y": "latent dim 2, -1 bottom to +1 top"},
    }
    return MapImage(pixels=pixels, legend=legend)


def save_map(image: MapImage, path) -> None:
    """Write the map as PNG (PPM fallback) plus a legend sidecar JSON."""
    path = Path(path)
    try:
        from PIL import Image

        Image.fromarray(image.pixels, mode="RGB").save(path)
    except ImportError:  # pragma: no cover - PIL is a hard dependency
        path = path.with_suffix(".ppm")
        h, w, _ = image.pixels.shape
        with open(path, "wb") as f:
            f.write(f"P6\n{w} {h}\n255\n".encode())
            f.write(image.pixels.tobytes())
    with open(path.with_suffix(path.suffix + ".legend.json"), "w") as f:
        json.dump(image.legend, f, indent=2)
        f.write("\n")
