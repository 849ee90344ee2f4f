#!/usr/bin/env python3
"""Tabulate how many pseudo-orthogonal hypervectors fit in D dimensions.

Prints the (D, P, N) table together with the dimension at which hypervector
capacity overtakes one-hot encoding.
"""

import argparse

from spikedec.harness import capacity_table


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--start", type=int, default=500)
    parser.add_argument("--stop", type=int, default=5000)
    parser.add_argument("--step", type=int, default=250)
    args = parser.parse_args()

    rows, crossover = capacity_table(range(args.start, args.stop + 1, args.step))
    print(f"{'D':>7}  {'P(pseudo-orth)':>16}  {'capacity N':>14}")
    for d, p, n in rows:
        print(f"{d:>7}  {p:>16.9f}  {n:>14}")
    print(f"\ncapacity overtakes one-hot at D = {crossover}")


if __name__ == "__main__":
    main()
