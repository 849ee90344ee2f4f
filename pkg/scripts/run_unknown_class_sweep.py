#!/usr/bin/env python3
"""Train a hypervector decoder on a class subset and sweep the rejection threshold.

Samples whose nearest class hypervector is at least delta away (normalized
Hamming) are declared Unknown; the table tracks full-dataset, known-class and
unknown-class accuracy as delta tightens.
"""

import argparse
from pathlib import Path

from spikedec.harness import ExperimentConfig, sweep_delta
from spikedec.harness.runners import delta_rows_csv


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("results/delta_sweep"))
    parser.add_argument("--epochs", type=int, default=15)
    parser.add_argument("--known", type=int, nargs="+", default=[0, 1])
    parser.add_argument(
        "--deltas", type=float, nargs="+",
        default=[0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4],
    )
    args = parser.parse_args()

    cfg = ExperimentConfig(
        decoders=["hdc"], known_classes=args.known, epochs=args.epochs
    )
    rows = sweep_delta(cfg, args.deltas)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "delta_sweep.csv").write_text(delta_rows_csv(rows))
    print(f"{'delta':>6}  {'full':>7}  {'known':>7}  {'unknown':>7}")
    for r in rows:
        print(
            f"{r.delta:>6.2f}  {100 * r.full_accuracy:>6.2f}%  "
            f"{100 * r.known_accuracy:>6.2f}%  {100 * r.unknown_accuracy:>6.2f}%"
        )


if __name__ == "__main__":
    main()
