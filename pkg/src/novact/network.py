"""Forward dynamics of the action network.

The network is a stack of leaky-integrator layers with increasing time
constants (fast -> mid -> slow), an input buffer, and a softmax output
layer, driven by a small static latent vector (the action-memory point)
that is broadcast to every context layer:

    u_i[t] = (1 - 1/tau_i) * u_i[t-1]
             + (1/tau_i) * (sum_j w_ij * P_j + sum_k w_ik * y_k[t-1] + b_i)

Activations are tanh on the context layers and, on the output layer, a
softmax applied independently to each joint's group of J units so every
group remains decodable as a probability vector. The input layer is a
pure buffer: it holds the frame supplied to the current step and has no
incoming weights. Wiring:

    input -> fast;   fast <-> mid;   mid <-> slow;   fast -> out

with self-recurrence inside fast/mid/slow and the latent vector feeding
fast, mid and slow (not the buffer, not the output).

A generation run keeps the latent point constant and can be chained
closed-loop: the input of step t is a convex mixture of the previous
prediction (weight gamma) and the teacher frame (weight 1 - gamma).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .codec import SoftmaxSequence
from .errors import MissingTeacher, ShapeMismatch

# Canonical parameter order; also the RNG draw order at initialization.
PARAM_FIELDS = (
    "w_fi", "w_ff", "w_fm", "w_f_pb", "b_f",
    "w_mf", "w_mm", "w_ms", "w_m_pb", "b_m",
    "w_sm", "w_ss", "w_s_pb", "b_s",
    "w_of", "b_o",
)


@dataclass(frozen=True)
class NetworkSpec:
    """Layer sizes and time constants.

    The input/output width is d * j (one softmax group of j units per
    joint). Time constants must be >= 1 and non-decreasing from fast to
    slow; the buffer and output layers are fixed at tau = 1.
    """

    d: int = 8
    j: int = 10
    pb_dim: int = 2
    fast: int = 40
    mid: int = 20
    slow: int = 10
    tau_fast: float = 2.0
    tau_mid: float = 4.0
    tau_slow: float = 8.0

    def __post_init__(self):
        if min(self.d, self.pb_dim, self.fast, self.mid, self.slow) < 1:
            raise ValueError("layer sizes and pb_dim must be positive")
        if self.j < 2:
            raise ValueError("need at least two softmax units per joint")
        if not (1.0 <= self.tau_fast <= self.tau_mid <= self.tau_slow):
            raise ValueError("time constants must satisfy 1 <= fast <= mid <= slow")

    @property
    def io(self) -> int:
        return self.d * self.j

    @property
    def n_context(self) -> int:
        return self.fast + self.mid + self.slow

    def param_shapes(self) -> dict:
        f, m, s, io, pb = self.fast, self.mid, self.slow, self.io, self.pb_dim
        return {
            "w_fi": (f, io), "w_ff": (f, f), "w_fm": (f, m), "w_f_pb": (f, pb), "b_f": (f,),
            "w_mf": (m, f), "w_mm": (m, m), "w_ms": (m, s), "w_m_pb": (m, pb), "b_m": (m,),
            "w_sm": (s, m), "w_ss": (s, s), "w_s_pb": (s, pb), "b_s": (s,),
            "w_of": (io, f), "b_o": (io,),
        }


@dataclass(frozen=True)
class PBPoint:
    """A point in the action-memory space; components lie in [-1, 1]."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        if p.ndim != 1 or not np.all(np.isfinite(p)):
            raise ValueError("latent point must be a finite 1-D vector")
        if np.any(np.abs(p) > 1.0):
            raise ValueError("latent point components must lie in [-1, 1]")
        object.__setattr__(self, "p", p)


@dataclass
class PBTable:
    """Learned latent internal states, one row per training pattern."""

    labels: tuple
    rho: np.ndarray

    def __post_init__(self):
        self.labels = tuple(self.labels)
        self.rho = np.asarray(self.rho, dtype=np.float64)
        if self.rho.ndim != 2 or self.rho.shape[0] != len(self.labels):
            raise ShapeMismatch("need one rho row per pattern label")
        if not np.all(np.isfinite(self.rho)):
            raise ShapeMismatch("rho contains non-finite values")

    def point(self, label: str) -> PBPoint:
        return pb_activation(self.rho[self.labels.index(label)])


def pb_activation(rho: np.ndarray) -> PBPoint:
    """Latent activation: component-wise tanh of the internal state."""
    rho = np.asarray(rho, dtype=np.float64)
    if not np.all(np.isfinite(rho)):
        raise ValueError("rho must be finite")
    return PBPoint(p=np.tanh(rho))


def _pb_vector(pb, dim: int) -> np.ndarray:
    vec = pb.p if isinstance(pb, PBPoint) else np.asarray(pb, dtype=np.float64)
    if vec.shape != (dim,):
        raise ShapeMismatch(f"latent point has shape {vec.shape}, expected ({dim},)")
    return vec


@dataclass
class NetworkParams:
    """All learnable parameters plus the per-pattern latent table."""

    spec: NetworkSpec
    weights: dict
    pb_table: PBTable

    def __post_init__(self):
        shapes = self.spec.param_shapes()
        for name in PARAM_FIELDS:
            if name not in self.weights:
                raise ShapeMismatch(f"missing parameter '{name}'")
            arr = np.asarray(self.weights[name], dtype=np.float64)
            if arr.shape != shapes[name]:
                raise ShapeMismatch(
                    f"'{name}' has shape {arr.shape}, expected {shapes[name]}"
                )
            if not np.all(np.isfinite(arr)):
                raise ShapeMismatch(f"'{name}' contains non-finite values")
            self.weights[name] = arr
        if self.pb_table.rho.shape[1] != self.spec.pb_dim:
            raise ShapeMismatch("pb table width does not match spec.pb_dim")

    @classmethod
    def zeros(cls, spec: NetworkSpec, labels=()) -> "NetworkParams":
        weights = {k: np.zeros(v) for k, v in spec.param_shapes().items()}
        table = PBTable(labels=tuple(labels), rho=np.zeros((len(labels), spec.pb_dim)))
        return cls(spec=spec, weights=weights, pb_table=table)

    def copy(self) -> "NetworkParams":
        return NetworkParams(
            spec=self.spec,
            weights={k: v.copy() for k, v in self.weights.items()},
            pb_table=PBTable(labels=self.pb_table.labels, rho=self.pb_table.rho.copy()),
        )


@dataclass
class NetworkState:
    """Internal states and activations after step t.

    u covers the non-buffer neurons in row order [fast | mid | slow | out];
    y_context holds the tanh activations of fast/mid/slow, y_output the
    per-group softmax of the output layer, y_input the buffered frame.
    """

    u: np.ndarray
    y_input: np.ndarray
    y_context: np.ndarray
    y_output: np.ndarray
    t: int = 0


@dataclass(frozen=True)
class _Fused:
    """Dense view of the block-structured weights for fast stepping."""

    w_rec: np.ndarray    # (n_context + io, io + n_context), destination-major
    w_pb: np.ndarray     # (n_context, pb_dim)
    b: np.ndarray        # (n_context + io,)
    inv_tau: np.ndarray  # (n_context + io,)
    spec: NetworkSpec
    blocks: dict = field(repr=False, default=None)


def _assemble(params: NetworkParams) -> _Fused:
    spec = params.spec
    f, m, s, io = spec.fast, spec.mid, spec.slow, spec.io
    nc = spec.n_context
    w = params.weights

    rows = {"f": slice(0, f), "m": slice(f, f + m), "s": slice(f + m, nc),
            "o": slice(nc, nc + io)}
    cols = {"i": slice(0, io), "f": slice(io, io + f),
            "m": slice(io + f, io + f + m), "s": slice(io + f + m, io + nc)}
    blocks = {
        "w_fi": (rows["f"], cols["i"]), "w_ff": (rows["f"], cols["f"]),
        "w_fm": (rows["f"], cols["m"]),
        "w_mf": (rows["m"], cols["f"]), "w_mm": (rows["m"], cols["m"]),
        "w_ms": (rows["m"], cols["s"]),
        "w_sm": (rows["s"], cols["m"]), "w_ss": (rows["s"], cols["s"]),
        "w_of": (rows["o"], cols["f"]),
    }
    w_rec = np.zeros((nc + io, io + nc))
    for name, (rs, cs) in blocks.items():
        w_rec[rs, cs] = w[name]
    w_pb = np.concatenate([w["w_f_pb"], w["w_m_pb"], w["w_s_pb"]], axis=0)
    b = np.concatenate([w["b_f"], w["b_m"], w["b_s"], w["b_o"]])
    inv_tau = np.concatenate([
        np.full(f, 1.0 / spec.tau_fast),
        np.full(m, 1.0 / spec.tau_mid),
        np.full(s, 1.0 / spec.tau_slow),
        np.ones(io),
    ])
    return _Fused(w_rec=w_rec, w_pb=w_pb, b=b, inv_tau=inv_tau, spec=spec, blocks=blocks)


def group_softmax(u: np.ndarray, d: int, j: int) -> np.ndarray:
    """Softmax over each joint's J-unit group along the last axis."""
    shaped = u.reshape(*u.shape[:-1], d, j)
    z = shaped - shaped.max(axis=-1, keepdims=True)
    e = np.exp(z)
    e /= e.sum(axis=-1, keepdims=True)
    return e.reshape(u.shape)


def _step_arrays(fused: _Fused, u_prev, y_ctx_prev, x, pb):
    """One synchronous update for a batch; returns (u, y_ctx, y_out).

    All arrays are batched (B, .); x is the frame written into the input
    buffer for this step, visible to the fast layer immediately.
    """
    nc = fused.spec.n_context
    z = np.concatenate([x, y_ctx_prev], axis=-1)
    net = z @ fused.w_rec.T + fused.b
    net[..., :nc] += pb @ fused.w_pb.T
    u = (1.0 - fused.inv_tau) * u_prev + fused.inv_tau * net
    y_ctx = np.tanh(u[..., :nc])
    y_out = group_softmax(u[..., nc:], fused.spec.d, fused.spec.j)
    return u, y_ctx, y_out


def init_state(spec: NetworkSpec) -> NetworkState:
    """Neutral start: u = 0 everywhere, so context activations are 0 and
    every output group is uniform 1/J."""
    return NetworkState(
        u=np.zeros(spec.n_context + spec.io),
        y_input=np.zeros(spec.io),
        y_context=np.zeros(spec.n_context),
        y_output=np.full(spec.io, 1.0 / spec.j),
        t=0,
    )


def _check_frame(frame: np.ndarray, spec: NetworkSpec, what: str = "input") -> np.ndarray:
    frame = np.asarray(frame, dtype=np.float64)
    if frame.shape != (spec.io,):
        raise ShapeMismatch(f"{what} frame has shape {frame.shape}, expected ({spec.io},)")
    sums = frame.reshape(spec.d, spec.j).sum(axis=1)
    if np.any(frame < 0) or np.max(np.abs(sums - 1.0)) > 1e-6:
        raise ShapeMismatch(f"{what} frame blocks are not probability vectors")
    return frame


def step(state: NetworkState, input_frame: np.ndarray, pb, params: NetworkParams) -> NetworkState:
    """Advance the network by one step with the given buffered frame."""
    spec = params.spec
    x = _check_frame(input_frame, spec)
    if state.u.shape != (spec.n_context + spec.io,):
        raise ShapeMismatch("state does not match the network spec")
    vec = _pb_vector(pb, spec.pb_dim)
    fused = _assemble(params)
    u, y_ctx, y_out = _step_arrays(
        fused, state.u[None], state.y_context[None], x[None], vec[None]
    )
    return NetworkState(u=u[0], y_input=x.copy(), y_context=y_ctx[0],
                        y_output=y_out[0], t=state.t + 1)


def mix_input(teacher: Optional[np.ndarray], prediction: np.ndarray, gamma: float) -> np.ndarray:
    """Convex mixture of teacher frame and previous prediction.

    gamma = 0 reproduces the teacher exactly (open loop); gamma = 1 feeds
    the model its own prediction (closed loop) and needs no teacher.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    prediction = np.asarray(prediction, dtype=np.float64)
    if gamma == 1.0:
        return prediction.copy()
    if teacher is None:
        raise MissingTeacher("teacher frame required when gamma < 1")
    teacher = np.asarray(teacher, dtype=np.float64)
    if teacher.shape != prediction.shape:
        raise ShapeMismatch("teacher and prediction frames differ in shape")
    return gamma * prediction + (1.0 - gamma) * teacher


def generate(
    params: NetworkParams,
    pb,
    steps: int,
    gamma: float = 1.0,
    initial_input: np.ndarray = None,
    teacher: Optional[SoftmaxSequence] = None,
):
    """Run the network for `steps` predictions from a constant latent point.

    The first step consumes `initial_input`; later steps consume the
    gamma-mixture of the model's previous prediction and teacher frame
    t (teacher frame 0 is never consumed, by convention it equals the
    initial input). Returns the prediction sequence and the final state.
    """
    spec = params.spec
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if initial_input is None:
        raise ValueError("initial_input is required")
    teacher_values = None
    if gamma < 1.0:
        if teacher is None:
            raise MissingTeacher("teacher sequence required when gamma < 1")
        teacher_values = teacher.values if isinstance(teacher, SoftmaxSequence) else np.asarray(teacher)
        if teacher_values.shape[0] < steps or teacher_values.shape[1] != spec.io:
            raise ShapeMismatch(
                f"teacher must provide at least {steps} frames of width {spec.io}"
            )
    x = _check_frame(initial_input, spec)
    vec = _pb_vector(pb, spec.pb_dim)
    fused = _assemble(params)

    u = np.zeros((1, spec.n_context + spec.io))
    y_ctx = np.zeros((1, spec.n_context))
    preds = np.empty((steps, spec.io))
    for t in range(steps):
        u, y_ctx, y_out = _step_arrays(fused, u, y_ctx, x[None], vec[None])
        preds[t] = y_out[0]
        if t + 1 < steps:
            ref = teacher_values[t + 1] if teacher_values is not None else None
            x = mix_input(ref, preds[t], gamma)
    final = NetworkState(u=u[0], y_input=x.copy(), y_context=y_ctx[0],
                         y_output=preds[-1].copy(), t=steps)
    return SoftmaxSequence(preds, units=spec.j), final


def generate_batch(
    params: NetworkParams, pb_batch: np.ndarray, steps: int, initial_input: np.ndarray
) -> np.ndarray:
    """Closed-loop generation for many latent points at once.

    pb_batch is (B, pb_dim); returns raw predictions (B, steps, io). Runs
    are independent and match `generate` with gamma = 1 up to the float
    associativity of the batched matrix products; a fixed batch layout is
    bitwise reproducible.
    """
    spec = params.spec
    pb_batch = np.asarray(pb_batch, dtype=np.float64)
    if pb_batch.ndim != 2 or pb_batch.shape[1] != spec.pb_dim:
        raise ShapeMismatch("pb_batch must be (B, pb_dim)")
    x0 = _check_frame(initial_input, spec)
    fused = _assemble(params)
    n = pb_batch.shape[0]
    u = np.zeros((n, spec.n_context + spec.io))
    y_ctx = np.zeros((n, spec.n_context))
    x = np.broadcast_to(x0, (n, spec.io)).copy()
    preds = np.empty((n, steps, spec.io))
    for t in range(steps):
        u, y_ctx, y_out = _step_arrays(fused, u, y_ctx, x, pb_batch)
        preds[:, t] = y_out
        x = y_out
    return preds
