"""Command-line entry point.

Subcommands cover the whole workflow: gen-data -> train -> sweep ->
measure / render-map -> serve / generate. Every run prints its effective
configuration (seeds included) so any artifact can be reproduced
bit-identically. Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import dataset, explorer, metrics, trainer
from .errors import NovactError
from .network import NetworkSpec, PBPoint, generate
from .codec import decode_array


class _Parser(argparse.ArgumentParser):
    """argparse with the documented usage exit code (1, not 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _print_config(args) -> None:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    print("config:", json.dumps(cfg, default=str))


def _apply_threads(args) -> None:
    threads = getattr(args, "threads", None)
    if threads is None:
        env = os.environ.get("NOVACT_THREADS")
        threads = int(env) if env else None
    if threads is not None:
        if threads < 1:
            raise NovactError("--threads must be >= 1")
        import numba

        numba.set_num_threads(threads)


def _gamma(value: str) -> float:
    gamma = float(value)
    if not 0.0 <= gamma <= 1.0:
        raise argparse.ArgumentTypeError(f"gamma must lie in [0, 1], got {value}")
    return gamma


def _spec_from_args(args, dims: int) -> NetworkSpec:
    return NetworkSpec(
        d=dims,
        j=args.j,
        pb_dim=args.pb_dim,
        fast=args.fast,
        mid=args.mid,
        slow=args.slow,
        tau_fast=args.tau_fast,
        tau_mid=args.tau_mid,
        tau_slow=args.tau_slow,
    )


def _add_spec_flags(p) -> None:
    p.add_argument("--j", type=int, default=10, help="softmax units per joint")
    p.add_argument("--pb-dim", type=int, default=2, help="latent dimensions")
    p.add_argument("--fast", type=int, default=40, help="fast layer size")
    p.add_argument("--mid", type=int, default=20, help="mid layer size")
    p.add_argument("--slow", type=int, default=10, help="slow layer size")
    p.add_argument("--tau-fast", type=float, default=2.0, help="fast time constant")
    p.add_argument("--tau-mid", type=float, default=4.0, help="mid time constant")
    p.add_argument("--tau-slow", type=float, default=8.0, help="slow time constant")


def _cmd_gen_data(args) -> None:
    cfg = dataset.SynthConfig(
        steps=args.steps,
        amplitude_scales=tuple(args.scales),
        noise=args.noise,
        seed=args.seed,
    )
    training_set = dataset.synthesize_boxing_set(cfg)
    manifest = dataset.save_training_set(training_set, args.out)
    print(f"wrote {len(training_set.patterns)} patterns to {manifest}")


def _cmd_train(args) -> None:
    training_set = dataset.load_training_set(args.data)
    spec = _spec_from_args(args, training_set.dims)
    config = trainer.TrainingConfig(
        gamma=args.gamma,
        epochs=args.epochs,
        eta=args.eta,
        seed=args.seed,
        checkpoint_interval=args.checkpoint_interval,
        init_scale=args.init_scale,
    )

    interval = args.checkpoint_interval

    def progress(epoch, loss):
        if interval and epoch % interval == 0:
            print(f"epoch {epoch}: loss {loss:.4f}", flush=True)

    checkpoint, curve = trainer.train(
        training_set, spec, config, sigma=args.sigma, progress=progress
    )
    trainer.save_checkpoint(checkpoint, args.out)
    if args.curve:
        curve.to_csv(args.curve)
    norm = trainer.kl_normalizer(training_set)
    print(
        f"best epoch {checkpoint.epoch}: loss {checkpoint.loss:.4f} "
        f"(mean per-step per-group KL {checkpoint.loss / norm:.5f}); wrote {args.out}"
    )


def _cmd_sweep(args) -> None:
    checkpoint = trainer.load_checkpoint(args.ckpt)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = explorer.GridSpec(resolution=args.resolution)
    result = explorer.sweep(
        checkpoint,
        grid,
        steps=args.steps,
        seed=args.seed,
        chunk_size=args.chunk,
        record_path=out / "record.jsonl",
        iterations=args.iterations,
        sample_size=args.sample_size,
        pool=args.pool,
        learned_threshold=args.learned_threshold,
    )
    with open(out / "report.json", "w") as f:
        json.dump(result.report, f, indent=2)
        f.write("\n")
    r = result.report
    print(
        f"swept {r['cells_total']} cells: "
        + ", ".join(f"{k} {v}" for k, v in r["counts"].items())
    )
    print(f"wrote {out / 'record.jsonl'} and {out / 'report.json'}")


def _cmd_measure(args) -> None:
    checkpoint = trainer.load_checkpoint(args.ckpt)
    resolution, cells = explorer.read_records(args.record)
    steps = args.steps if args.steps else checkpoint.stats.max_steps
    report = explorer.summarize_cells(
        cells,
        checkpoint,
        steps=steps,
        seed=args.seed,
        iterations=args.iterations,
        sample_size=args.sample_size,
        pool=args.pool,
        learned_threshold=args.learned_threshold,
    )
    with open(args.out, "w") as f:
        json.dump(report, f, indent=2)
        f.write("\n")
    print(f"measured {resolution}x{resolution} record; wrote {args.out}")


def _cmd_render_map(args) -> None:
    checkpoint = trainer.load_checkpoint(args.ckpt)
    _, cells = explorer.read_records(args.record)
    threshold = (
        args.learned_threshold
        if args.learned_threshold is not None
        else metrics.default_learned_threshold(checkpoint.training_set)
    )
    image = explorer.render_map(cells, checkpoint.training_set.labels, threshold)
    explorer.save_map(image, args.out)
    print(f"wrote {args.out}")


def _cmd_serve(args) -> None:
    from .service import ServeConfig, serve

    serve(
        ServeConfig(
            checkpoint_path=args.ckpt,
            sweep_record_path=args.record,
            host=args.host,
            port=args.port,
            max_steps=args.max_steps,
            ui_dir=args.ui,
        )
    )


def _cmd_generate(args) -> None:
    checkpoint = trainer.load_checkpoint(args.ckpt)
    steps = args.steps if args.steps else checkpoint.stats.max_steps
    seq, _ = generate(
        checkpoint.params,
        PBPoint(p=np.array(args.pb)),
        steps=steps,
        gamma=1.0,
        initial_input=explorer.home_input(checkpoint),
    )
    decoded = decode_array(seq.values, checkpoint.codec)
    rule = metrics.rule_from_stats(checkpoint.stats)
    threshold = metrics.default_learned_threshold(checkpoint.training_set)
    label = metrics.classify_pattern(decoded, rule, checkpoint.training_set, threshold)
    if args.out:
        import csv

        with open(args.out, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(checkpoint.training_set.joint_names)
            for row in decoded:
                writer.writerow([repr(float(v)) for v in row])
        print(f"wrote {args.out}")
    print(f"class: {label.kind}" + (f" (nearest {label.nearest}, min DTW {label.min_dtw:.3f})"
                                    if label.nearest else ""))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="novact",
        description="Learn basic robot actions and explore novel ones in a 2-D action-memory space.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("gen-data", help="synthesize the boxing training set",
                       formatter_class=fmt)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--steps", type=int, default=50, help="frames per action")
    p.add_argument("--noise", type=float, default=0.0, help="gaussian noise amplitude (rad)")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--scales", type=float, nargs=6, default=[1.0] * 6,
                   help="per-action amplitude scales")
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("train", help="train a model on a trajectory manifest",
                       formatter_class=fmt)
    p.add_argument("--data", required=True, help="manifest JSON path")
    p.add_argument("--out", required=True, help="checkpoint output path")
    p.add_argument("--curve", default=None, help="learning-curve CSV output path")
    p.add_argument("--gamma", type=_gamma, default=0.5,
                   help="closed-loop ratio in [0, 1]")
    p.add_argument("--epochs", type=int, default=20000, help="training epochs")
    p.add_argument("--eta", type=float, default=1e-3, help="learning rate")
    p.add_argument("--seed", type=int, default=0, help="initialization seed")
    p.add_argument("--sigma", type=float, default=0.5, help="softmax shape parameter")
    p.add_argument("--init-scale", type=float, default=0.0,
                   help="weight init half-range (0 = 1/sqrt(fan_in))")
    p.add_argument("--checkpoint-interval", type=int, default=1000,
                   help="progress print interval in epochs (0 = quiet)")
    _add_spec_flags(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("sweep", help="classify a latent grid and write records",
                       formatter_class=fmt)
    p.add_argument("--ckpt", required=True, help="checkpoint path")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--resolution", type=int, default=200, help="grid points per axis")
    p.add_argument("--steps", type=int, default=None, help="generation steps (default: training length)")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.add_argument("--chunk", type=int, default=4096, help="cells generated per batch")
    p.add_argument("--iterations", type=int, default=30, help="resampling iterations")
    p.add_argument("--sample-size", type=int, default=30, help="patterns per resample")
    p.add_argument("--pool", choices=["appropriate", "all"], default="appropriate",
                   help="sampling pool for novelty/diversity")
    p.add_argument("--learned-threshold", type=float, default=None,
                   help="DTW threshold for the learned class (default: calibrated)")
    p.add_argument("--threads", type=int, default=None, help="cap worker threads")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("measure", help="recompute the report from an existing record",
                       formatter_class=fmt)
    p.add_argument("--ckpt", required=True, help="checkpoint path")
    p.add_argument("--record", required=True, help="sweep record JSONL path")
    p.add_argument("--out", required=True, help="report JSON output path")
    p.add_argument("--steps", type=int, default=None, help="generation steps (default: training length)")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.add_argument("--iterations", type=int, default=30, help="resampling iterations")
    p.add_argument("--sample-size", type=int, default=30, help="patterns per resample")
    p.add_argument("--pool", choices=["appropriate", "all"], default="appropriate",
                   help="sampling pool for novelty/diversity")
    p.add_argument("--learned-threshold", type=float, default=None,
                   help="DTW threshold for the learned class (default: calibrated)")
    p.add_argument("--threads", type=int, default=None, help="cap worker threads")
    p.set_defaults(func=_cmd_measure)

    p = sub.add_parser("render-map", help="render the latent map image",
                       formatter_class=fmt)
    p.add_argument("--ckpt", required=True, help="checkpoint path")
    p.add_argument("--record", required=True, help="sweep record JSONL path")
    p.add_argument("--out", required=True, help="PNG output path")
    p.add_argument("--learned-threshold", type=float, default=None,
                   help="DTW threshold used for brightness clipping")
    p.set_defaults(func=_cmd_render_map)

    p = sub.add_parser("serve", help="serve a checkpoint over HTTP",
                       formatter_class=fmt)
    p.add_argument("--ckpt", required=True, help="checkpoint path")
    p.add_argument("--record", default=None, help="sweep record JSONL path")
    p.add_argument("--host", default="127.0.0.1", help="bind address")
    p.add_argument("--port", type=int, default=8000, help="bind port")
    p.add_argument("--max-steps", type=int, default=200, help="largest allowed generation length")
    p.add_argument("--ui", default=None, help="static UI directory to serve at /")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("generate", help="generate one action from a latent point",
                       formatter_class=fmt)
    p.add_argument("--ckpt", required=True, help="checkpoint path")
    p.add_argument("--pb", type=float, nargs=2, required=True, metavar=("X", "Y"),
                   help="latent point in [-1, 1]^2")
    p.add_argument("--steps", type=int, default=None, help="generation steps (default: training length)")
    p.add_argument("--out", default=None, help="decoded trajectory CSV output path")
    p.set_defaults(func=_cmd_generate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _print_config(args)
    try:
        _apply_threads(args)
        args.func(args)
    except NovactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
