#!/usr/bin/env python3
"""Produce the committed fixture artifacts for the frontend e2e tests:
a desk-scale checkpoint and a matching sweep record."""

import sys
from pathlib import Path

from novact.dataset import SynthConfig, synthesize_boxing_set
from novact.explorer import GridSpec, sweep
from novact.network import NetworkSpec
from novact.trainer import TrainingConfig, save_checkpoint, train


def main() -> int:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("frontend/fixtures")
    out_dir.mkdir(parents=True, exist_ok=True)
    training_set = synthesize_boxing_set(SynthConfig())
    checkpoint, _ = train(
        training_set,
        NetworkSpec(),
        TrainingConfig(gamma=0.5, epochs=12000, seed=0),
    )
    save_checkpoint(checkpoint, out_dir / "ckpt.json")
    sweep(
        checkpoint,
        GridSpec(resolution=40),
        seed=0,
        record_path=out_dir / "record.jsonl",
        iterations=5,
        sample_size=10,
    )
    print(f"wrote {out_dir / 'ckpt.json'} and {out_dir / 'record.jsonl'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
