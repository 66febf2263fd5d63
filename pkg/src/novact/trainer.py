"""Learning: exact backprop through time, Adam, and checkpointing.

Every pattern is learned as one-step prediction: inputs are frames
1..T-1 (each a gamma-mixture of teacher frame and previous prediction),
targets are frames 2..T, and the error is the KL divergence between
target and predicted softmax blocks summed over units and steps. The
weights and biases are shared across patterns; each pattern additionally
owns a latent internal-state vector (rho) that receives only its own
gradient. Gradients are exact, including the path through the
prediction-to-input mixing when gamma > 0 and through tanh for rho.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, asdict, replace
from pathlib import Path

import numpy as np

from .codec import CodecSpec, SoftmaxSequence, build_reference_points, encode_trajectory
from .dataset import TrainingSet, TrainingStats, training_stats
from .errors import (
    CorruptCheckpoint,
    Diverged,
    ShapeMismatch,
    VersionMismatch,
)
from .network import (
    PARAM_FIELDS,
    NetworkParams,
    NetworkSpec,
    PBTable,
    _assemble,
    group_softmax,
)
from .codec import JointTrajectory

CHECKPOINT_FORMAT = "novact-ckpt/1"

# Predictions are floored at this value inside the log only.
PRED_FLOOR = 1e-12


@dataclass(frozen=True)
class TrainingConfig:
    """Hyperparameters of one training run."""

    gamma: float = 0.5
    epochs: int = 20000
    eta: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    checkpoint_interval: int = 0
    init_scale: float = 0.0  # 0 -> per-matrix 1/sqrt(fan_in)

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.eta <= 0:
            raise ValueError("learning rate must be positive")


@dataclass
class LearningCurve:
    """Per-epoch total loss and wall-clock time."""

    losses: np.ndarray
    seconds: np.ndarray

    def to_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write("epoch,loss,seconds\n")
            for i, (loss, sec) in enumerate(zip(self.losses, self.seconds), start=1):
                f.write(f"{i},{loss!r},{sec:.6f}\n")

    def __len__(self) -> int:
        return len(self.losses)


def kl_loss(prediction, target) -> float:
    """Sum over steps and units of target * log(target / prediction).

    Zero-target terms contribute zero; predictions are floored at 1e-12
    inside the log so the loss stays finite.
    """
    pred = prediction.values if isinstance(prediction, SoftmaxSequence) else np.asarray(prediction, dtype=np.float64)
    targ = target.values if isinstance(target, SoftmaxSequence) else np.asarray(target, dtype=np.float64)
    if pred.shape != targ.shape:
        raise ShapeMismatch(f"prediction {pred.shape} vs target {targ.shape}")
    lp = np.log(np.maximum(pred, PRED_FLOOR))
    lt = np.log(np.where(targ > 0, targ, 1.0))
    return float(np.sum(np.where(targ > 0, targ * (lt - lp), 0.0)))


def _forward(fused, teacher: np.ndarray, rho: np.ndarray, gamma: float, keep_caches: bool):
    """Run the mixed-input forward pass over a batch of same-length patterns.

    teacher is (B, T, io); returns (loss, caches). Caches are time-major
    arrays used by the backward pass, omitted when keep_caches is False.
    The inner loop writes into preallocated buffers; the loss term is
    computed once over all steps at the end.
    """
    spec = fused.spec
    b, t_len, _ = teacher.shape
    steps = t_len - 1
    nc, io = spec.n_context, spec.io
    p_act = np.tanh(rho)
    pb_net = p_act @ fused.w_pb.T
    w_rec_t = np.ascontiguousarray(fused.w_rec.T)

    zs = np.zeros((steps, b, io + nc))
    ys = np.empty((steps, b, nc))
    preds = np.empty((steps, b, io))
    u = np.zeros((b, nc + io))
    leak = 1.0 - fused.inv_tau
    zs[0, :, :io] = teacher[:, 0]
    for t in range(steps):
        net = np.dot(zs[t], w_rec_t)
        net += fused.b
        net[:, :nc] += pb_net
        net *= fused.inv_tau
        u *= leak
        u += net
        np.tanh(u[:, :nc], out=ys[t])
        preds[t] = group_softmax(u[:, nc:], spec.d, spec.j)
        if t + 1 < steps:
            np.multiply(preds[t], gamma, out=zs[t + 1, :, :io])
            zs[t + 1, :, :io] += (1.0 - gamma) * teacher[:, t + 1]
            zs[t + 1, :, io:] = ys[t]
    targ = np.swapaxes(teacher[:, 1:], 0, 1)
    lp = np.log(np.maximum(preds, PRED_FLOOR))
    lt = np.log(np.where(targ > 0, targ, 1.0))
    loss = float(np.sum(np.where(targ > 0, targ * (lt - lp), 0.0)))
    caches = {"z": zs, "y_ctx": ys, "pred": preds, "p_act": p_act} if keep_caches else None
    return loss, caches


def _backward(fused, teacher: np.ndarray, caches, gamma: float):
    """Exact gradients of the forward loss; returns (weight grads, rho grads)."""
    spec = fused.spec
    nc, io = spec.n_context, spec.io
    b, t_len, _ = teacher.shape
    steps = t_len - 1
    p_act = caches["p_act"]

    gw_rec = np.zeros_like(fused.w_rec)
    gw_pb = np.zeros_like(fused.w_pb)
    gb = np.zeros_like(fused.b)
    g_pact = np.zeros_like(p_act)

    gu_next = np.zeros((b, nc + io))
    gz_next = None
    leak = 1.0 - fused.inv_tau
    for t in range(steps - 1, -1, -1):
        pred = caches["pred"][t]
        targ = teacher[:, t + 1]
        # loss term through the floored log
        gp = np.where(pred > PRED_FLOOR, -targ / np.maximum(pred, PRED_FLOOR), 0.0)
        # prediction fed back into the next input
        if gz_next is not None and gamma > 0.0:
            gp += gamma * gz_next[:, :io]
        # through the per-group softmax
        shaped_p = pred.reshape(b, spec.d, spec.j)
        shaped_g = gp.reshape(b, spec.d, spec.j)
        dots = np.sum(shaped_p * shaped_g, axis=2, keepdims=True)
        gu_o = (shaped_p * (shaped_g - dots)).reshape(b, io)

        gu = gu_next
        gu *= leak
        gu[:, nc:] += gu_o
        if gz_next is not None:
            gu[:, :nc] += gz_next[:, io:] * (1.0 - caches["y_ctx"][t] ** 2)

        gnet = gu * fused.inv_tau
        gw_rec += gnet.T @ caches["z"][t]
        gb += gnet.sum(axis=0)
        gw_pb += gnet[:, :nc].T @ p_act
        g_pact += gnet[:, :nc] @ fused.w_pb
        gz_next = np.dot(gnet, fused.w_rec)
        gu_next = gu

    g_rho = g_pact * (1.0 - p_act**2)
    return {"w_rec": gw_rec, "w_pb": gw_pb, "b": gb}, g_rho


def _split_grads(fused, raw: dict) -> dict:
    """Slice the fused gradient arrays back into the named parameters."""
    spec = fused.spec
    f, m, s = spec.fast, spec.mid, spec.slow
    nc, io = spec.n_context, spec.io
    out = {name: raw["w_rec"][rs, cs] for name, (rs, cs) in fused.blocks.items()}
    out["w_f_pb"] = raw["w_pb"][:f]
    out["w_m_pb"] = raw["w_pb"][f:f + m]
    out["w_s_pb"] = raw["w_pb"][f + m:nc]
    out["b_f"] = raw["b"][:f]
    out["b_m"] = raw["b"][f:f + m]
    out["b_s"] = raw["b"][f + m:nc]
    out["b_o"] = raw["b"][nc:nc + io]
    return out


def sequence_loss(params: NetworkParams, pattern, rho: np.ndarray, gamma: float) -> float:
    """Forward-only loss of one pattern; the finite-difference target."""
    teacher = pattern.values if isinstance(pattern, SoftmaxSequence) else np.asarray(pattern)
    fused = _assemble(params)
    loss, _ = _forward(fused, teacher[None], np.asarray(rho, dtype=np.float64)[None], gamma, False)
    return loss


def bptt_gradients(params: NetworkParams, pattern, rho: np.ndarray, gamma: float) -> dict:
    """Exact gradients of one pattern's loss.

    Returns a dict with one entry per named weight/bias plus 'rho' for
    the pattern's latent internal state.
    """
    teacher = pattern.values if isinstance(pattern, SoftmaxSequence) else np.asarray(pattern)
    if teacher.ndim != 2 or teacher.shape[0] < 2:
        raise ShapeMismatch("pattern needs at least two frames")
    fused = _assemble(params)
    rho = np.asarray(rho, dtype=np.float64)
    _, caches = _forward(fused, teacher[None], rho[None], gamma, True)
    raw, g_rho = _backward(fused, teacher[None], caches, gamma)
    grads = _split_grads(fused, raw)
    grads["rho"] = g_rho[0]
    return grads


@dataclass
class AdamState:
    """First/second moment estimates per parameter array."""

    m: dict
    v: dict
    t: int = 0

    @classmethod
    def for_arrays(cls, arrays: dict) -> "AdamState":
        return cls(
            m={k: np.zeros_like(a) for k, a in arrays.items()},
            v={k: np.zeros_like(a) for k, a in arrays.items()},
        )


def adam_update(arrays: dict, grads: dict, state: AdamState, config: TrainingConfig) -> AdamState:
    """One bias-corrected Adam step, applied in place."""
    state.t += 1
    b1, b2 = config.beta1, config.beta2
    c1 = 1.0 - b1**state.t
    c2 = 1.0 - b2**state.t
    for key, arr in arrays.items():
        g = grads[key]
        m = state.m[key]
        v = state.v[key]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        arr -= config.eta * (m / c1) / (np.sqrt(v / c2) + config.eps)
    return state


def init_params(spec: NetworkSpec, labels, seed: int, scale: float = 0.0) -> NetworkParams:
    """Seeded initialization: biases and rho at zero, weights uniform in
    [-s, s] with s = 1/sqrt(fan_in) per matrix (or the given scale)."""
    rng = np.random.default_rng(seed)
    shapes = spec.param_shapes()
    weights = {}
    for name in PARAM_FIELDS:
        shape = shapes[name]
        if name.startswith("b_"):
            weights[name] = np.zeros(shape)
        else:
            s = scale if scale > 0 else 1.0 / np.sqrt(shape[1])
            weights[name] = rng.uniform(-s, s, size=shape)
    table = PBTable(labels=tuple(labels), rho=np.zeros((len(labels), spec.pb_dim)))
    return NetworkParams(spec=spec, weights=weights, pb_table=table)


@dataclass
class Checkpoint:
    """Everything needed to regenerate and classify actions."""

    spec: NetworkSpec
    params: NetworkParams
    codec: CodecSpec
    stats: TrainingStats
    config: TrainingConfig
    epoch: int
    loss: float
    training_set: TrainingSet


def kl_normalizer(training_set: TrainingSet) -> int:
    """Number of (step, group) loss terms in one epoch: sum (T-1) * D."""
    return sum((traj.steps - 1) * traj.dims for traj in training_set.trajectories())


def train(
    training_set: TrainingSet,
    spec: NetworkSpec,
    config: TrainingConfig,
    sigma: float = 0.5,
    progress=None,
):
    """Full-batch training; returns the lowest-loss checkpoint and the curve.

    Patterns of equal length are batched together; gradient accumulation
    order is fixed (ascending length, manifest order within a group) so
    runs are bit-reproducible for a given seed on one platform.
    """
    if spec.d != training_set.dims:
        raise ShapeMismatch(
            f"spec.d={spec.d} but training set has {training_set.dims} joints"
        )
    codec = build_reference_points(training_set, spec.j, sigma)
    encoded = [encode_trajectory(traj, codec).values for traj in training_set.trajectories()]
    stats = training_stats(training_set)

    by_len = {}
    for idx, arr in enumerate(encoded):
        by_len.setdefault(arr.shape[0], []).append(idx)
    groups = [
        (np.stack([encoded[i] for i in idxs]), np.array(idxs))
        for t_len, idxs in sorted(by_len.items())
    ]

    params = init_params(spec, training_set.labels, config.seed, config.init_scale)
    rho = params.pb_table.rho
    arrays = dict(params.weights)
    arrays["rho"] = rho
    adam = AdamState.for_arrays(arrays)

    losses = np.empty(config.epochs)
    seconds = np.empty(config.epochs)
    best_loss = np.inf
    best_epoch = 0
    best_params = params.copy()

    for epoch in range(1, config.epochs + 1):
        tic = time.perf_counter()
        fused = _assemble(params)
        total = 0.0
        acc = None
        rho_grads = np.zeros_like(rho)
        for teacher, idxs in groups:
            loss, caches = _forward(fused, teacher, rho[idxs], config.gamma, True)
            raw, g_rho = _backward(fused, teacher, caches, config.gamma)
            total += loss
            rho_grads[idxs] = g_rho
            if acc is None:
                acc = raw
            else:
                for key in acc:
                    acc[key] += raw[key]
        if not np.isfinite(total):
            raise Diverged(f"loss became non-finite at epoch {epoch}")
        if total < best_loss:
            best_loss = total
            best_epoch = epoch
            best_params = params.copy()
        grads = _split_grads(fused, acc)
        grads["rho"] = rho_grads
        adam_update(arrays, grads, adam, config)
        losses[epoch - 1] = total
        seconds[epoch - 1] = time.perf_counter() - tic
        if progress is not None:
            progress(epoch, total)

    curve = LearningCurve(losses=losses, seconds=seconds)
    checkpoint = Checkpoint(
        spec=spec,
        params=best_params,
        codec=codec,
        stats=stats,
        config=config,
        epoch=best_epoch,
        loss=best_loss,
        training_set=training_set,
    )
    return checkpoint, curve


def save_checkpoint(checkpoint: Checkpoint, path) -> None:
    """Serialize a checkpoint as one self-contained JSON document."""
    doc = {
        "format": CHECKPOINT_FORMAT,
        "spec": asdict(checkpoint.spec),
        "config": asdict(checkpoint.config),
        "epoch": checkpoint.epoch,
        "loss": checkpoint.loss,
        "codec": {
            "references": checkpoint.codec.references.tolist(),
            "sigma": checkpoint.codec.sigma,
        },
        "stats": {
            "joint_min": checkpoint.stats.joint_min.tolist(),
            "joint_max": checkpoint.stats.joint_max.tolist(),
            "max_step_velocity": checkpoint.stats.max_step_velocity,
            "max_steps": checkpoint.stats.max_steps,
            "home": checkpoint.stats.home.tolist(),
        },
        "weights": {k: checkpoint.params.weights[k].tolist() for k in PARAM_FIELDS},
        "pb": {
            "labels": list(checkpoint.params.pb_table.labels),
            "rho": checkpoint.params.pb_table.rho.tolist(),
        },
        "training_set": {
            "joint_names": list(checkpoint.training_set.joint_names),
            "sample_period_s": checkpoint.training_set.sample_period_s,
            "patterns": [
                {"label": label, "values": traj.values.tolist()}
                for label, traj in checkpoint.training_set.patterns
            ],
        },
    }
    with open(path, "w") as f:
        json.dump(doc, f)
        f.write("\n")


def load_checkpoint(path) -> Checkpoint:
    """Load and validate a checkpoint written by save_checkpoint."""
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptCheckpoint(f"'{path}' is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "format" not in doc:
        raise CorruptCheckpoint(f"'{path}' has no format tag")
    if doc["format"] != CHECKPOINT_FORMAT:
        raise VersionMismatch(
            f"unsupported checkpoint format '{doc['format']}', expected '{CHECKPOINT_FORMAT}'"
        )
    try:
        spec = NetworkSpec(**doc["spec"])
        config = TrainingConfig(**doc["config"])
        codec = CodecSpec(
            references=np.array(doc["codec"]["references"], dtype=np.float64),
            sigma=float(doc["codec"]["sigma"]),
        )
        stats = TrainingStats(
            joint_min=np.array(doc["stats"]["joint_min"], dtype=np.float64),
            joint_max=np.array(doc["stats"]["joint_max"], dtype=np.float64),
            max_step_velocity=float(doc["stats"]["max_step_velocity"]),
            max_steps=int(doc["stats"]["max_steps"]),
            home=np.array(doc["stats"]["home"], dtype=np.float64),
        )
        weights = {k: np.array(v, dtype=np.float64) for k, v in doc["weights"].items()}
        table = PBTable(
            labels=tuple(doc["pb"]["labels"]),
            rho=np.array(doc["pb"]["rho"], dtype=np.float64),
        )
        params = NetworkParams(spec=spec, weights=weights, pb_table=table)
        ts_doc = doc["training_set"]
        patterns = tuple(
            (entry["label"], JointTrajectory(values=np.array(entry["values"]), name=entry["label"]))
            for entry in ts_doc["patterns"]
        )
        training_set = TrainingSet(
            patterns=patterns,
            joint_names=tuple(ts_doc["joint_names"]),
            sample_period_s=float(ts_doc["sample_period_s"]),
        )
        return Checkpoint(
            spec=spec,
            params=params,
            codec=codec,
            stats=stats,
            config=config,
            epoch=int(doc["epoch"]),
            loss=float(doc["loss"]),
            training_set=training_set,
        )
    except (KeyError, TypeError, ValueError, ShapeMismatch) as exc:
        raise CorruptCheckpoint(f"'{path}' is structurally invalid: {exc}") from exc
