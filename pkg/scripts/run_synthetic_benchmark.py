#!/usr/bin/env python3
"""Train all three decoders on the built-in synthetic task and print the report.

The comparison table mirrors the harness CSV output: accuracy over seeds,
average spikes, estimated energy at 26 pJ per synaptic operation, decision
latency, and columns relative to the hypervector-decoded model.
"""

import argparse
from pathlib import Path

from spikedec.harness import ExperimentConfig, run_experiment


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("results/synthetic"))
    parser.add_argument("--epochs", type=int, default=35)
    parser.add_argument("--seeds", type=int, nargs="+", default=[0])
    parser.add_argument("--dims", type=int, default=64)
    parser.add_argument("--beta", type=float, default=0.9)
    args = parser.parse_args()

    cfg = ExperimentConfig(
        decoders=["rate", "latency", "hdc"],
        epochs=args.epochs,
        seeds=args.seeds,
        dims=args.dims,
        beta=args.beta,
    )
    report = run_experiment(cfg, args.out)
    print(report.text_table())
    print(f"full CSVs written to {args.out}")


if __name__ == "__main__":
    main()
