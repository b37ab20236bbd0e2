"""Correct-prefix table: parse + readout of chains of length 1..10 for several n.

    python scripts/chain_table.py --ns 1e5,5e5 --trials 20 --out results/chain.csv

Set ACBLOCKS_WORKERS to run trials in parallel. At n=1e6 one trial of
length 10 needs a few GB, so keep workers low there.
"""

import argparse

from acblocks import experiments
from acblocks.cli import int_list


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ns", type=int_list, default=int_list("1e5,5e5"))
    ap.add_argument("--k", type=int, default=50)
    ap.add_argument("--p", type=float, default=0.1)
    ap.add_argument("--beta", type=float, default=0.1)
    ap.add_argument("--lengths", type=int_list, default=int_list("1-10"))
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--no-strong", action="store_true", help="skip the strong-assembly count")
    ap.add_argument("--out", default="results/chain.csv")
    args = ap.parse_args()

    records = experiments.run_chain_experiment(
        args.ns, args.k, args.p, args.beta, args.lengths, args.trials, args.seed,
        strong=not args.no_strong,
    )
    summary = experiments.write_csv(records, args.out)
    print(f"{len(records)} trials -> {args.out}")
    for row in experiments.summarize(records):
        print(f"n={row['n']:>8} len={row['chain_len']:>2}  "
              f"prefix {row['mean_correct_prefix']:.2f} +- {row['std_correct_prefix']:.2f}  "
              f"strong {row['mean_strong']:.2f}  rounds/block {row['rounds_per_block']:.1f}")
    print(f"summary -> {summary}")


if __name__ == "__main__":
    main()
