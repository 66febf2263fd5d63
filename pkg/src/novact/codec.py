"""Conversion between analog joint angles and the sparse softmax form.

Each scalar joint value x is represented by J non-negative units laid over
J linearly spaced reference points spanning that joint's training range:

    softmax_j = exp(-((ref_j - x) / h)^2 / sigma) / sum_k exp(-((ref_k - x) / h)^2 / sigma)

where h is the reference spacing, so sigma is a dimensionless shape
parameter and the encoding quality does not depend on the physical units
of the joint. Decoding is the softmax-weighted mean of the reference
points. With sigma = 0.5 and J = 10 the worst-case roundtrip error is
0.1198 * h (at the range edges), i.e. below 1e-2 rad whenever a joint's
training range is at most ~0.75 rad.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AllZero, DegenerateRange, DimensionMismatch

DEFAULT_UNITS = 10
DEFAULT_SIGMA = 0.5

# Softmax blocks must sum to one within this tolerance.
BLOCK_SUM_TOL = 1e-9
# Blocks with total mass below this cannot be renormalized for decoding.
DECODE_FLOOR = 1e-12


@dataclass(frozen=True)
class JointTrajectory:
    """One robot action: a (T, D) matrix of joint angles in radians."""

    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] < 2:
            raise DimensionMismatch(
                f"trajectory must be a (T>=2, D) matrix, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise DimensionMismatch("trajectory contains non-finite values")
        object.__setattr__(self, "values", values)

    @property
    def steps(self) -> int:
        return self.values.shape[0]

    @property
    def dims(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class SoftmaxSequence:
    """A (T, D*J) matrix whose contiguous J-blocks are probability vectors."""

    values: np.ndarray
    units: int = field(default=DEFAULT_UNITS)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] < 1:
            raise DimensionMismatch(
                f"sequence must be a (T, D*J) matrix, got shape {values.shape}"
            )
        if values.shape[1] % self.units != 0:
            raise DimensionMismatch(
                f"width {values.shape[1]} is not a multiple of J={self.units}"
            )
        if np.any(values < 0):
            raise DimensionMismatch("softmax sequence has negative entries")
        sums = values.reshape(values.shape[0], -1, self.units).sum(axis=2)
        if np.max(np.abs(sums - 1.0)) > BLOCK_SUM_TOL:
            raise DimensionMismatch("softmax blocks do not sum to 1")
        object.__setattr__(self, "values", values)

    @property
    def steps(self) -> int:
        return self.values.shape[0]

    @property
    def dims(self) -> int:
        return self.values.shape[1] // self.units


@dataclass(frozen=True)
class CodecSpec:
    """Reference layout of the softmax transform.

    references: (D, J) matrix, row d holding the J linearly spaced points
    spanning joint d's training range. sigma is dimensionless.
    """

    references: np.ndarray
    sigma: float = DEFAULT_SIGMA

    def __post_init__(self):
        refs = np.asarray(self.references, dtype=np.float64)
        if refs.ndim != 2 or refs.shape[1] < 2:
            raise DimensionMismatch("references must be a (D, J>=2) matrix")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        diffs = np.diff(refs, axis=1)
        if np.any(diffs <= 0):
            raise ValueError("reference points must be strictly increasing")
        # linear spacing: all gaps within a row agree to float tolerance
        if np.max(np.abs(diffs - diffs[:, :1])) > 1e-9 * np.max(np.abs(refs)):
            raise ValueError("reference points must be linearly spaced")
        object.__setattr__(self, "references", refs)

    @property
    def dims(self) -> int:
        return self.references.shape[0]

    @property
    def units(self) -> int:
        return self.references.shape[1]

    @property
    def spacing(self) -> np.ndarray:
        """Per-dimension gap between adjacent reference points, shape (D,)."""
        return self.references[:, 1] - self.references[:, 0]

    @property
    def width(self) -> int:
        """Total encoded width D*J."""
        return self.dims * self.units


def build_reference_points(
    training_set, units: int = DEFAULT_UNITS, sigma: float = DEFAULT_SIGMA
) -> CodecSpec:
    """Lay out J reference points per joint spanning the observed range.

    `training_set` is a list of JointTrajectory (or anything exposing a
    `.patterns` list of (label, JointTrajectory) pairs).
    """
    if hasattr(training_set, "patterns"):
        trajectories = [traj for _, traj in training_set.patterns]
    else:
        trajectories = list(training_set)
    if units < 2:
        raise ValueError("need at least two softmax units per joint")
    if not trajectories:
        raise ValueError("training set is empty")
    dims = trajectories[0].dims
    stacked = np.vstack([t.values for t in trajectories])
    if stacked.shape[1] != dims:
        raise DimensionMismatch("trajectories disagree on joint count")
    lo = stacked.min(axis=0)
    hi = stacked.max(axis=0)
    narrow = hi - lo < 1e-9
    if np.any(narrow):
        idx = int(np.argmax(narrow))
        raise DegenerateRange(
            f"joint {idx} never moves in the training data (range < 1e-9 rad)"
        )
    refs = np.linspace(lo, hi, units, axis=1)
    return CodecSpec(references=refs, sigma=sigma)


def _block_weights(values: np.ndarray, refs: np.ndarray, sigma: float) -> np.ndarray:
    """Unnormalized softmax weights; values (..., D), refs (D, J) -> (..., D, J)."""
    spacing = refs[:, 1] - refs[:, 0]
    dist = (refs - values[..., None]) / spacing[:, None]
    z = -(dist**2) / sigma
    z -= z.max(axis=-1, keepdims=True)
    return np.exp(z)


def encode_analog(value: float, refs: np.ndarray, sigma: float = DEFAULT_SIGMA) -> np.ndarray:
    """Encode one scalar joint value against one row of reference points."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    refs = np.asarray(refs, dtype=np.float64)
    w = _block_weights(np.array([float(value)]), refs[None, :], sigma)[0]
    return w / w.sum()


def decode_softmax(vec: np.ndarray, refs: np.ndarray) -> float:
    """Decode one J-block back to radians (weighted mean of references).

    The block is renormalized to sum 1 first, so filtered or edited inputs
    remain decodable; network outputs already sum to 1 and pass through
    unchanged.
    """
    vec = np.asarray(vec, dtype=np.float64)
    refs = np.asarray(refs, dtype=np.float64)
    if vec.shape != refs.shape:
        raise DimensionMismatch(f"block shape {vec.shape} != references {refs.shape}")
    if np.any(vec < 0):
        raise DimensionMismatch("softmax block has negative entries")
    total = vec.sum()
    if total < DECODE_FLOOR:
        raise AllZero("softmax block is numerically zero")
    return float((vec / total) @ refs)


def encode_frame(frame: np.ndarray, spec: CodecSpec) -> np.ndarray:
    """Encode one (D,) joint posture into a flat (D*J,) softmax frame."""
    frame = np.asarray(frame, dtype=np.float64)
    if frame.shape != (spec.dims,):
        raise DimensionMismatch(f"frame shape {frame.shape}, codec expects ({spec.dims},)")
    w = _block_weights(frame, spec.references, spec.sigma)
    w /= w.sum(axis=-1, keepdims=True)
    return w.reshape(spec.width)


def encode_trajectory(traj: JointTrajectory, spec: CodecSpec) -> SoftmaxSequence:
    """Encode a (T, D) trajectory into its (T, D*J) sparse form."""
    if traj.dims != spec.dims:
        raise DimensionMismatch(
            f"trajectory has {traj.dims} joints, codec expects {spec.dims}"
        )
    w = _block_weights(traj.values, spec.references, spec.sigma)
    w /= w.sum(axis=-1, keepdims=True)
    return SoftmaxSequence(w.reshape(traj.steps, spec.width), units=spec.units)


def decode_array(values: np.ndarray, spec: CodecSpec) -> np.ndarray:
    """Decode a raw (T, D*J) array to (T, D) radians without wrapping."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[1] != spec.width:
        raise DimensionMismatch(
            f"sequence width {values.shape} does not match codec width {spec.width}"
        )
    blocks = values.reshape(values.shape[0], spec.dims, spec.units)
    totals = blocks.sum(axis=2)
    if np.any(totals < DECODE_FLOOR):
        raise AllZero("a softmax block is numerically zero")
    return np.einsum("tdj,dj->td", blocks / totals[..., None], spec.references)


def decode_trajectory(seq: SoftmaxSequence, spec: CodecSpec, name: str = "") -> JointTrajectory:
    """Decode a sparse sequence back to a joint trajectory in radians."""
    if seq.units != spec.units:
        raise DimensionMismatch(f"sequence J={seq.units} != codec J={spec.units}")
    return JointTrajectory(values=decode_array(seq.values, spec), name=name)
