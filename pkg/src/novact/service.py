"""HTTP service exposing a trained checkpoint to the explorer UI.

All responses are derived from an immutable checkpoint (plus an optional
sweep record file), so the service is stateless across requests and any
generation response is value-identical to calling the library directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .errors import BindError, CheckpointLoadError, NovactError
from .explorer import home_input, read_records
from .metrics import (
    LEARNED,
    UNLEARNED,
    classify_pattern,
    default_learned_threshold,
    rule_from_stats,
)
from .network import PBPoint, generate
from .codec import decode_array
from .trainer import Checkpoint, load_checkpoint


@dataclass
class ServeConfig:
    """Where the service finds its artifacts and how it binds."""

    checkpoint_path: str
    sweep_record_path: Optional[str] = None
    host: str = "127.0.0.1"
    port: int = 8000
    max_steps: int = 200
    ui_dir: Optional[str] = None

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": code, "message": message})


# Ties in the majority-class downsample resolve in this fixed order.
_CLASS_PRIORITY = (LEARNED, UNLEARNED, "fluctuating", "non-moving")


def _downsample(cells, sweep_res: int, res: int):
    """Majority-class block downsample from sweep_res to res (res divides
    blocks by floor mapping; 200 -> 100 is an exact 2x2 reduction)."""
    out = []
    for oy in range(res):
        y0 = oy * sweep_res // res
        y1 = max((oy + 1) * sweep_res // res, y0 + 1)
        for ox in range(res):
            x0 = ox * sweep_res // res
            x1 = max((ox + 1) * sweep_res // res, x0 + 1)
            block = [
                cells[iy * sweep_res + ix]
                for iy in range(y0, y1)
                for ix in range(x0, x1)
            ]
            counts = {}
            for c in block:
                counts[c.kind] = counts.get(c.kind, 0) + 1
            kind = max(counts, key=lambda k: (counts[k], -_CLASS_PRIORITY.index(k)))
            winners = [c for c in block if c.kind == kind]
            if kind in (LEARNED, UNLEARNED):
                near_counts = {}
                for c in winners:
                    near_counts[c.nearest] = near_counts.get(c.nearest, 0) + 1
                nearest = max(sorted(near_counts), key=lambda k: near_counts[k])
                dtw_vals = [c.min_dtw for c in winners if c.nearest == nearest]
                min_dtw = float(np.mean(dtw_vals))
            else:
                nearest, min_dtw = None, None
            out.append({"class": kind, "nearest": nearest, "min_dtw": min_dtw})
    return out


def build_app(
    checkpoint: Checkpoint,
    sweep_cells=None,
    sweep_resolution: Optional[int] = None,
    max_steps: int = 200,
    ui_dir: Optional[str] = None,
) -> FastAPI:
    """Assemble the API around one loaded checkpoint."""
    app = FastAPI(title="novact explorer service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    rule = rule_from_stats(checkpoint.stats)
    threshold = default_learned_threshold(checkpoint.training_set)
    initial = home_input(checkpoint)
    pb_points = np.tanh(checkpoint.params.pb_table.rho)

    @app.get("/api/info")
    def info():
        spec = checkpoint.spec
        return {
            "spec": {
                "d": spec.d,
                "j": spec.j,
                "pb_dim": spec.pb_dim,
                "layers": {"fast": spec.fast, "mid": spec.mid, "slow": spec.slow},
                "time_constants": {
                    "fast": spec.tau_fast,
                    "mid": spec.tau_mid,
                    "slow": spec.tau_slow,
                },
            },
            "gamma": checkpoint.config.gamma,
            "patterns": [
                {"label": label, "pb": pb_points[i].tolist()}
                for i, label in enumerate(checkpoint.params.pb_table.labels)
            ],
            "joint_names": list(checkpoint.training_set.joint_names),
            "max_steps": max_steps,
            "default_steps": checkpoint.stats.max_steps,
            "learned_threshold": threshold,
        }

    @app.post("/api/generate")
    async def handle_generate(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "bad_request", "request body is not valid JSON")
        if not isinstance(body, dict) or "pb" not in body:
            return _error(400, "bad_request", "body must be a JSON object with a 'pb' field")
        pb = body["pb"]
        if (
            not isinstance(pb, (list, tuple))
            or len(pb) != checkpoint.spec.pb_dim
            or not all(isinstance(v, (int, float)) for v in pb)
        ):
            return _error(400, "bad_request", f"'pb' must be {checkpoint.spec.pb_dim} numbers")
        if any(abs(v) > 1.0 for v in pb):
            return _error(400, "pb_out_of_range", "pb components must lie in [-1, 1]")
        steps = body.get("steps", checkpoint.stats.max_steps)
        if not isinstance(steps, int) or isinstance(steps, bool) or not 1 <= steps <= max_steps:
            return _error(400, "steps_out_of_range", f"steps must be an integer in [1, {max_steps}]")
        seq, _ = generate(
            checkpoint.params,
            PBPoint(p=np.array(pb, dtype=np.float64)),
            steps=steps,
            gamma=1.0,
            initial_input=initial,
        )
        decoded = decode_array(seq.values, checkpoint.codec)
        label = classify_pattern(decoded, rule, checkpoint.training_set, threshold)
        return {
            "trajectory": decoded.tolist(),
            "class": label.kind,
            "nearest": label.nearest,
            "min_dtw": label.min_dtw,
        }

    @app.get("/api/map")
    def handle_map(resolution: Optional[int] = None):
        if sweep_cells is None:
            return _error(404, "no_sweep", "no sweep record configured")
        res = sweep_resolution if resolution is None else resolution
        if res < 1 or res > sweep_resolution:
            return _error(400, "bad_request", f"resolution must lie in [1, {sweep_resolution}]")
        if res == sweep_resolution:
            payload = [
                {"class": c.kind, "nearest": c.nearest, "min_dtw": c.min_dtw}
                for c in sweep_cells
            ]
        else:
            payload = _downsample(sweep_cells, sweep_resolution, res)
        return {
            "resolution": res,
            "cells": payload,
            "legend": {
                "order": "row-major, index iy * resolution + ix",
                "x": "latent dim 1 ascending",
                "y": "latent dim 2 ascending",
                "classes": list(_CLASS_PRIORITY),
                "learned_threshold": threshold,
            },
        }

    @app.exception_handler(NovactError)
    async def novact_error(_request, exc):  # pragma: no cover - defensive
        return _error(400, "bad_request", str(exc))

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app


def load_app(config: ServeConfig) -> FastAPI:
    """Load artifacts from disk and build the app."""
    try:
        checkpoint = load_checkpoint(config.checkpoint_path)
    except NovactError as exc:
        raise CheckpointLoadError(f"cannot load checkpoint: {exc}") from exc
    cells = None
    resolution = None
    if config.sweep_record_path is not None:
        resolution, cells = read_records(config.sweep_record_path)
    return build_app(
        checkpoint,
        sweep_cells=cells,
        sweep_resolution=resolution,
        max_steps=config.max_steps,
        ui_dir=config.ui_dir,
    )


def serve(config: ServeConfig) -> None:
    """Run the service until interrupted."""
    import uvicorn

    app = load_app(config)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    except OSError as exc:
        raise BindError(f"cannot bind {config.host}:{config.port}: {exc}") from exc
