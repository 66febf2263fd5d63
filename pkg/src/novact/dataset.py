"""Training trajectories: synthetic boxing actions and CSV ingestion.

The synthetic generator stands in for recorded demonstrations. Each of
the six actions is a table of raised-cosine bumps, one per joint, with
action-specific amplitudes and activation windows. All actions start and
end at a shared home posture (all joints at 0 rad), and per-joint
amplitudes are kept small enough that every joint's observed range stays
below ~0.65 rad, which keeps the softmax codec's roundtrip error well
under 1e-2 rad at the default sigma.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .codec import JointTrajectory
from .errors import InconsistentDims, NonFinite, ParseError

JOINT_NAMES = (
    "r_shoulder_pitch",
    "r_shoulder_roll",
    "r_elbow_yaw",
    "r_elbow_roll",
    "l_shoulder_pitch",
    "l_shoulder_roll",
    "l_elbow_yaw",
    "l_elbow_roll",
)

ACTION_LABELS = (
    "left_jab",
    "right_straight",
    "left_hook",
    "right_hook",
    "left_uppercut",
    "right_uppercut",
)

# Striking-arm profiles: per punch type, (amplitude in rad, window start
# fraction, window end fraction) for shoulder pitch/roll, elbow yaw/roll.
# Windows differ in width so the actions differ in speed: jabs snap,
# hooks and uppercuts sweep.
_PUNCH_PROFILES = {
    "jab": (
        (-0.32, 0.16, 0.48),
        (+0.10, 0.16, 0.48),
        (-0.14, 0.14, 0.44),
        (+0.30, 0.20, 0.50),
    ),
    "straight": (
        (-0.35, 0.18, 0.62),
        (+0.08, 0.18, 0.62),
        (-0.18, 0.15, 0.58),
        (+0.34, 0.22, 0.66),
    ),
    "hook": (
        (-0.16, 0.12, 0.80),
        (+0.32, 0.18, 0.84),
        (+0.20, 0.14, 0.76),
        (+0.16, 0.22, 0.82),
    ),
    "uppercut": (
        (+0.28, 0.15, 0.85),
        (+0.12, 0.12, 0.72),
        (-0.10, 0.15, 0.75),
        (+0.34, 0.25, 0.88),
    ),
}

# Counter-sway of the non-striking (guard) arm.
_GUARD_PROFILE = (
    (-0.06, 0.20, 0.90),
    (+0.05, 0.22, 0.88),
    (+0.03, 0.25, 0.85),
    (+0.06, 0.20, 0.90),
)


@dataclass(frozen=True)
class SynthConfig:
    """Settings of the synthetic action generator."""

    steps: int = 50
    amplitude_scales: tuple = (1.0,) * 6
    noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.steps < 10:
            raise ValueError("need at least 10 steps per action")
        if self.noise < 0:
            raise ValueError("noise amplitude must be non-negative")
        if len(self.amplitude_scales) != len(ACTION_LABELS):
            raise ValueError(f"expected {len(ACTION_LABELS)} amplitude scales")


@dataclass(frozen=True)
class TrainingSet:
    """Labeled trajectories sharing one joint layout."""

    patterns: tuple
    joint_names: tuple
    sample_period_s: float = 0.05

    def __post_init__(self):
        if not self.patterns:
            raise ValueError("training set is empty")
        dims = self.patterns[0][1].dims
        labels = [label for label, _ in self.patterns]
        if len(set(labels)) != len(labels):
            raise ParseError("pattern labels are not unique")
        for label, traj in self.patterns:
            if traj.dims != dims:
                raise InconsistentDims(
                    f"pattern '{label}' has {traj.dims} joints, expected {dims}"
                )
        if len(self.joint_names) != dims:
            raise InconsistentDims("joint name count does not match data")
        object.__setattr__(self, "patterns", tuple(self.patterns))
        object.__setattr__(self, "joint_names", tuple(self.joint_names))

    @property
    def dims(self) -> int:
        return self.patterns[0][1].dims

    @property
    def labels(self) -> tuple:
        return tuple(label for label, _ in self.patterns)

    def trajectories(self) -> list:
        return [traj for _, traj in self.patterns]


@dataclass(frozen=True)
class TrainingStats:
    """Summary of a training set used for generation and filtering."""

    joint_min: np.ndarray
    joint_max: np.ndarray
    max_step_velocity: float
    max_steps: int
    home: np.ndarray

    @property
    def joint_range(self) -> np.ndarray:
        return self.joint_max - self.joint_min


def _bump(phase: np.ndarray, start: float, end: float) -> np.ndarray:
    """Raised cosine supported on [start, end] of the normalized timeline."""
    s = (phase - start) / (end - start)
    inside = (s >= 0.0) & (s <= 1.0)
    return np.where(inside, 0.5 * (1.0 - np.cos(2.0 * np.pi * np.clip(s, 0.0, 1.0))), 0.0)


def _action_profile(label: str):
    """Map an action label to (striking joints, punch profile)."""
    side, punch = label.split("_", 1)
    arm = slice(4, 8) if side == "left" else slice(0, 4)
    guard = slice(0, 4) if side == "left" else slice(4, 8)
    return arm, guard, _PUNCH_PROFILES[punch]


def synthesize_boxing_set(cfg: SynthConfig = SynthConfig()) -> TrainingSet:
    """Generate the six stylized boxing actions, deterministically."""
    rng = np.random.default_rng(cfg.seed)
    phase = np.linspace(0.0, 1.0, cfg.steps)
    patterns = []
    for label, scale in zip(ACTION_LABELS, cfg.amplitude_scales):
        arm, guard, profile = _action_profile(label)
        values = np.zeros((cfg.steps, len(JOINT_NAMES)))
        for joint, (amp, start, end) in zip(range(arm.start, arm.stop), profile):
            values[:, joint] = scale * amp * _bump(phase, start, end)
        for joint, (amp, start, end) in zip(range(guard.start, guard.stop), _GUARD_PROFILE):
            values[:, joint] = amp * _bump(phase, start, end)
        if cfg.noise > 0:
            values += rng.normal(0.0, cfg.noise, size=values.shape)
        patterns.append((label, JointTrajectory(values=values, name=label)))
    return TrainingSet(patterns=tuple(patterns), joint_names=JOINT_NAMES)


def training_stats(training_set: TrainingSet) -> TrainingStats:
    """Per-joint extents, velocity baseline, and the home posture."""
    stacked = np.vstack([traj.values for traj in training_set.trajectories()])
    velocities = [np.abs(np.diff(traj.values, axis=0)) for traj in training_set.trajectories()]
    first_frames = np.stack([traj.values[0] for traj in training_set.trajectories()])
    return TrainingStats(
        joint_min=stacked.min(axis=0),
        joint_max=stacked.max(axis=0),
        max_step_velocity=float(max(v.max() for v in velocities)),
        max_steps=max(traj.steps for traj in training_set.trajectories()),
        home=first_frames.mean(axis=0),
    )


def save_training_set(training_set: TrainingSet, out_dir) -> Path:
    """Write one CSV per pattern plus a manifest; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for label, traj in training_set.patterns:
        filename = f"{label}.csv"
        with open(out_dir / filename, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(training_set.joint_names)
            for row in traj.values:
                writer.writerow([repr(float(v)) for v in row])
        entries.append({"label": label, "file": filename})
    manifest = {
        "patterns": entries,
        "sample_period_s": training_set.sample_period_s,
    }
    manifest_path = out_dir / "manifest.json"
    with open(manifest_path, "w") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
    return manifest_path


def _load_csv(path: Path) -> tuple:
    try:
        with open(path, newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
    except OSError as exc:
        raise ParseError(f"cannot read '{path}': {exc}") from exc
    if len(rows) < 2:
        raise ParseError(f"'{path}' needs a header row and at least one data row")
    header = tuple(name.strip() for name in rows[0])
    width = len(header)
    values = np.empty((len(rows) - 1, width))
    for i, row in enumerate(rows[1:]):
        if len(row) != width:
            raise ParseError(f"'{path}' row {i + 2} has {len(row)} cells, expected {width}")
        try:
            values[i] = [float(cell) for cell in row]
        except ValueError as exc:
            raise ParseError(f"'{path}' row {i + 2}: {exc}") from exc
    if not np.all(np.isfinite(values)):
        raise NonFinite(f"'{path}' contains NaN or infinite values")
    return header, values


def load_training_set(manifest_path) -> TrainingSet:
    """Load a manifest plus its trajectory CSV files."""
    manifest_path = Path(manifest_path)
    try:
        with open(manifest_path, encoding="utf-8") as f:
            manifest = json.load(f)
    except OSError as exc:
        raise ParseError(f"cannot read manifest '{manifest_path}': {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"manifest '{manifest_path}' is not valid JSON: {exc}") from exc
    entries = manifest.get("patterns")
    if not isinstance(entries, list) or not entries:
        raise ParseError("manifest must list at least one pattern")
    base = manifest_path.parent
    patterns = []
    joint_names = None
    for entry in entries:
        if not isinstance(entry, dict) or "label" not in entry or "file" not in entry:
            raise ParseError("each manifest pattern needs 'label' and 'file'")
        header, values = _load_csv(base / entry["file"])
        if joint_names is None:
            joint_names = header
        elif len(header) != len(joint_names):
            raise InconsistentDims(
                f"'{entry['file']}' has {len(header)} joints, expected {len(joint_names)}"
            )
        try:
            traj = JointTrajectory(values=values, name=entry["label"])
        except Exception as exc:
            raise ParseError(f"'{entry['file']}': {exc}") from exc
        patterns.append((entry["label"], traj))
    return TrainingSet(
        patterns=tuple(patterns),
        joint_names=joint_names,
        sample_period_s=float(manifest.get("sample_period_s", 0.05)),
    )
