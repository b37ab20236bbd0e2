"""Longest fully read-back chain for a grid of (n, k).

    python scripts/maxchain_table.py --ns 1e5 --ks 10,20,30,40,50,60 --trials 20

Prints the k with the best mean for each n so the window of good k is easy
to spot.
"""

import argparse

from acblocks import experiments
from acblocks.cli import int_list


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ns", type=int_list, default=int_list("1e5"))
    ap.add_argument("--ks", type=int_list, default=int_list("10,20,30,40,50,60"))
    ap.add_argument("--p", type=float, default=0.1)
    ap.add_argument("--beta", type=float, default=0.1)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--max-len", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/maxchain.csv")
    args = ap.parse_args()

    records = experiments.run_maxchain_experiment(
        args.ns, args.ks, args.p, args.beta, args.trials, args.seed, args.max_len
    )
    experiments.write_csv(records, args.out, by_length=False)
    rows = experiments.summarize(records, by_length=False)
    for row in rows:
        print(f"n={row['n']:>8} k={row['k']:>3}  max chain "
              f"{row['mean_correct_prefix']:.2f} +- {row['std_correct_prefix']:.2f}")
    for n in args.ns:
        best = max((r for r in rows if r["n"] == n), key=lambda r: r["mean_correct_prefix"])
        print(f"best k at n={n}: {best['k']}")


if __name__ == "__main__":
    main()
