"""Blocks-world planning and chaining experiments on an Assembly Calculus brain.

Run as ``acblocks <command>`` or ``python -m acblocks.cli <command>``.

Commands:
  plan           plan a task file, symbolically or through the neural programs
  chain-exp      correct-prefix statistics of parse + readout
  maxchain-exp   longest fully read-back chain per (n, k)
  strong-exp     strong-assembly counts along parsed chains
  validate       check a plan file against a task file
  gen            write a random task file

Experiment trials run in ``ACBLOCKS_WORKERS`` worker processes (default 1).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiments
from .config import BrainConfig
from .instances import parse_task, random_task, serialize_task
from .planner import NeuralBackend, PlanningError, misplaced_count, plan_2approx, plan_naive
from .world import WorldError, parse_plan, validate_plan

EXIT_INVALID = 1
EXIT_PARSE = 2
EXIT_NEURAL = 3


def int_list(text: str) -> list[int]:
    """``"3,5,7"`` or ``"1-10"`` (inclusive) or a mix; scientific notation allowed."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(float(lo)), int(float(hi)) + 1))
        elif part:
            out.append(int(float(part)))
    if not out:
        raise argparse.ArgumentTypeError(f"empty list {text!r}")
    return out


def _brain_args(p: argparse.ArgumentParser, n_list: bool = False, k_list: bool = False) -> None:
    p.add_argument("--n", type=int_list if n_list else lambda s: int(float(s)),
                   default=[100_000] if n_list else 100_000, help="neurons per area")
    p.add_argument("--k", type=int_list if k_list else int, default=[50] if k_list else 50,
                   help="winners per step")
    p.add_argument("--p", type=float, default=0.1, help="connection probability")
    p.add_argument("--beta", type=float, default=0.1, help="plasticity rate")
    p.add_argument("--seed", type=int, default=0)


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def cmd_plan(args) -> int:
    try:
        task = parse_task(_read(args.task))
    except (OSError, WorldError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    planner = plan_naive if args.algo == "naive" else plan_2approx
    backend = None
    if args.mode == "neural":
        cfg = BrainConfig(args.n, args.k, args.p, args.beta, args.seed)
        backend = NeuralBackend(task.initial, task.goal, cfg, table=not args.no_table)
    try:
        plan = planner(task.initial, task.goal, backend)
    except PlanningError as exc:
        print(f"neural planning failed: {exc}", file=sys.stderr)
        _dump_trace(args.trace, exc.trace)
        return EXIT_NEURAL
    _write(args.out, plan.text())
    verdict = validate_plan(task.initial, task.goal, plan.moves)
    report = {
        "algo": plan.provenance,
        "mode": args.mode,
        "moves": len(plan.moves),
        "misplaced": misplaced_count(task.initial, task.goal),
        "valid": verdict.ok,
    }
    if backend is not None:
        rounds = [r for ev in plan.trace if ev["event"] == "parse" for r in ev["rounds"]]
        report["rounds_per_block"] = round(sum(rounds) / max(len(rounds), 1), 2)
        report["readouts_ok"] = plan.readouts_ok
        _dump_trace(args.trace, plan.trace)
    print(json.dumps(report), file=sys.stderr)
    return 0 if verdict.ok else EXIT_INVALID


def _dump_trace(path: str | None, trace) -> None:
    if path:
        Path(path).write_text("".join(json.dumps(ev) + "\n" for ev in trace))
    else:
        for ev in trace:
            print(json.dumps(ev), file=sys.stderr)


def cmd_validate(args) -> int:
    try:
        task = parse_task(_read(args.task))
        moves = parse_plan(_read(args.plan))
    except (OSError, WorldError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    verdict = validate_plan(task.initial, task.goal, moves)
    if verdict.ok:
        print(f"valid: {len(moves)} moves")
        return 0
    print(f"invalid at move {verdict.failed_index}: {verdict.reason}")
    return EXIT_INVALID


def cmd_gen(args) -> int:
    try:
        task = random_task(args.s, args.max_stacks, args.max_height, args.seed)
    except WorldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    _write(args.out, serialize_task(task))
    return 0


def _finish(records, out: str, by_length: bool = True) -> int:
    summary = experiments.write_csv(records, out, by_length)
    print(Path(summary).read_text(), end="")
    return 0


def cmd_chain(args) -> int:
    records = experiments.run_chain_experiment(
        args.n, args.k, args.p, args.beta, args.lengths, args.trials, args.seed,
        strong=args.command == "strong-exp",
    )
    return _finish(records, args.out)


def cmd_maxchain(args) -> int:
    records = experiments.run_maxchain_experiment(
        args.n, args.k, args.p, args.beta, args.trials, args.seed, args.max_len
    )
    return _finish(records, args.out, by_length=False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="acblocks", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan a task file")
    p.add_argument("task", help="task file, or - for stdin")
    p.add_argument("--algo", choices=("naive", "approx"), default="approx")
    p.add_argument("--mode", choices=("symbolic", "neural"), default="symbolic")
    _brain_args(p)
    p.add_argument("--out", help="plan file (default stdout)")
    p.add_argument("--trace", help="write the neural trace here as JSON lines")
    p.add_argument("--no-table", action="store_true", help="skip the table chain")
    p.set_defaults(func=cmd_plan)

    for name, helptext in (("chain-exp", "parse + readout statistics"),
                           ("strong-exp", "strong-assembly counts")):
        p = sub.add_parser(name, help=helptext)
        _brain_args(p, n_list=True)
        p.add_argument("--lengths", type=int_list, default=int_list("1-10"))
        p.add_argument("--trials", type=int, default=20)
        p.add_argument("--out", default=f"results/{name.replace('-', '_')}.csv")
        p.set_defaults(func=cmd_chain)

    p = sub.add_parser("maxchain-exp", help="longest fully read-back chain per (n, k)")
    _brain_args(p, n_list=True, k_list=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--max-len", type=int, default=40)
    p.add_argument("--out", default="results/maxchain_exp.csv")
    p.set_defaults(func=cmd_maxchain)

    p = sub.add_parser("validate", help="check a plan against a task")
    p.add_argument("task")
    p.add_argument("plan")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gen", help="write a random task")
    p.add_argument("--s", type=int, default=10, help="number of blocks")
    p.add_argument("--max-stacks", type=int, default=5)
    p.add_argument("--max-height", type=int, default=7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="task file (default stdout)")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
