"""Plan random tasks through the neural stack programs and score the plans.

    python scripts/neural_planning.py --tasks 20 --s 10 --max-height 4 --out results/planning.csv

One row per task: whether the neural plan is valid, whether every readout
came back complete, whether it equals the symbolic plan, plan length, and
the error if the run aborted. Each task takes about a minute at n=1e5.
"""

import argparse
import csv
import time
from pathlib import Path

from acblocks.config import BrainConfig
from acblocks.instances import random_task
from acblocks.planner import NeuralBackend, PlanningError, plan_2approx, plan_naive
from acblocks.world import validate_plan

FIELDS = ("task", "algo", "valid", "readouts_ok", "same_as_symbolic", "moves", "seconds", "error")


def run_task(seed, args, planner):
    task = random_task(args.s, args.max_stacks, args.max_height, seed)
    symbolic = planner(task.initial, task.goal)
    cfg = BrainConfig(args.n, args.k, args.p, args.beta, seed)
    backend = NeuralBackend(task.initial, task.goal, cfg)
    start = time.time()
    row = dict(task=seed, algo=symbolic.provenance, valid=False, readouts_ok=False,
               same_as_symbolic=False, moves="", error="")
    try:
        plan = planner(task.initial, task.goal, backend)
        row.update(valid=validate_plan(task.initial, task.goal, plan.moves).ok,
                   readouts_ok=plan.readouts_ok, same_as_symbolic=plan.moves == symbolic.moves,
                   moves=len(plan.moves))
    except PlanningError as exc:
        row["error"] = str(exc)
    row["seconds"] = round(time.time() - start, 1)
    return row


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tasks", type=int, default=20)
    ap.add_argument("--first", type=int, default=0, help="first task seed")
    ap.add_argument("--s", type=int, default=10)
    ap.add_argument("--max-stacks", type=int, default=5)
    ap.add_argument("--max-height", type=int, default=4)
    ap.add_argument("--algo", choices=("naive", "approx"), default="approx")
    ap.add_argument("--n", type=lambda x: int(float(x)), default=100_000)
    ap.add_argument("--k", type=int, default=50)
    ap.add_argument("--p", type=float, default=0.1)
    ap.add_argument("--beta", type=float, default=0.1)
    ap.add_argument("--out", default="results/planning.csv")
    args = ap.parse_args()
    planner = plan_naive if args.algo == "naive" else plan_2approx

    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    valid = 0
    with open(args.out, "w", newline="") as f:
        w = csv.DictWriter(f, FIELDS)
        w.writeheader()
        for seed in range(args.first, args.first + args.tasks):
            row = run_task(seed, args, planner)
            w.writerow(row)
            f.flush()
            valid += row["valid"]
            print(f"task {seed:3d}: valid={row['valid']} complete={row['readouts_ok']} "
                  f"same={row['same_as_symbolic']} {row['seconds']}s {row['error']}", flush=True)
    print(f"{valid}/{args.tasks} valid")


if __name__ == "__main__":
    main()
