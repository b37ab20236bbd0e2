"""Chaining-capacity experiments and their CSV output.

Every trial builds a fresh brain. Its seed is derived from the master seed,
the cell and the trial index::

    SeedSequence([master, n, k, round(p * 1e6), round(beta * 1e6), chain_len, trial])
        .generate_state(1)[0]

so any single trial can be rerun alone. The block order of a chain trial is a
permutation of ``1..chain_len`` drawn from the same seed.

Trials can run in worker processes (``ACBLOCKS_WORKERS``, default 1); rows
are always written in cell order, then trial order.
"""

from __future__ import annotations

import csv
import dataclasses
import os
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import BrainConfig, ProgramConfig
from .stacks import build_brain, count_strong_assemblies, parse_stack, read_chain

WORKERS_ENV = "ACBLOCKS_WORKERS"
FIELDS = ("n", "k", "p", "beta", "chain_len", "trial", "seed", "correct_prefix", "strong", "rounds")
SUMMARY_FIELDS = (
    "n", "k", "p", "beta", "chain_len", "trials",
    "mean_correct_prefix", "std_correct_prefix", "mean_strong", "std_strong",
    "rounds_per_block",
)


@dataclasses.dataclass(frozen=True)
class ChainTrialRecord:
    n: int
    k: int
    p: float
    beta: float
    chain_len: int
    trial: int
    seed: int
    correct_prefix: int
    strong: int
    rounds: int

    def row(self) -> list:
        return [getattr(self, f) for f in FIELDS]


@dataclasses.dataclass(frozen=True)
class Cell:
    n: int
    k: int
    p: float
    beta: float
    chain_len: int


def trial_seed(master: int, cell: Cell, trial: int) -> int:
    key = [
        master, cell.n, cell.k, round(cell.p * 1e6), round(cell.beta * 1e6),
        cell.chain_len, trial,
    ]
    return int(np.random.SeedSequence(key).generate_state(1)[0])


def correct_prefix(decoded: Sequence[int], truth: Sequence[int]) -> int:
    count = 0
    for a, b in zip(decoded, truth):
        if a != b:
            break
        count += 1
    return count


def chain_trial(
    cell: Cell, trial: int, master_seed: int = 0,
    program: ProgramConfig = ProgramConfig(), strong: bool = True,
) -> ChainTrialRecord:
    """Parse a random ordering of ``1..chain_len`` and read it back."""
    seed = trial_seed(master_seed, cell, trial)
    cfg = BrainConfig(cell.n, cell.k, cell.p, cell.beta, seed)
    rng = np.random.default_rng(seed)
    stack = [int(b) for b in rng.permutation(np.arange(1, cell.chain_len + 1))]
    brain, regs = build_brain(cfg, cell.chain_len)
    rep = parse_stack(brain, regs[""], stack, program)
    decoded = read_chain(brain, rep, cfg=program).blocks
    count = count_strong_assemblies(brain, rep, program) if strong else 0
    return ChainTrialRecord(
        cell.n, cell.k, cell.p, cell.beta, cell.chain_len, trial, seed,
        correct_prefix(decoded, stack), count, sum(rep.rounds),
    )


def maxchain_trial(
    n: int, k: int, p: float, beta: float, trial: int, master_seed: int = 0,
    max_len: int = 40, program: ProgramConfig = ProgramConfig(),
) -> ChainTrialRecord:
    """Grow the chain length until the first length not read back fully.

    The record's ``correct_prefix`` is the longest fully correct length and
    ``chain_len`` the length that failed (or ``max_len`` if none did).
    """
    best, last = 0, None
    for length in range(1, max_len + 1):
        last = chain_trial(Cell(n, k, p, beta, length), trial, master_seed, program, strong=False)
        if last.correct_prefix < length:
            break
        best = length
    return dataclasses.replace(last, correct_prefix=best)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _run_all(fn, jobs: list[tuple]) -> list[ChainTrialRecord]:
    workers = _workers()
    if workers == 1 or len(jobs) <= 1:
        return [fn(*job) for job in jobs]
    with ProcessPoolExecutor(workers) as pool:
        futures = [pool.submit(fn, *job) for job in jobs]
        return [f.result() for f in futures]


def run_chain_experiment(
    ns: Iterable[int], k: int, p: float, beta: float, lengths: Iterable[int],
    trials: int, master_seed: int = 0, strong: bool = True,
) -> list[ChainTrialRecord]:
    cells = [Cell(n, k, p, beta, length) for n in ns for length in lengths]
    jobs = [(cell, t, master_seed, ProgramConfig(), strong) for cell in cells for t in range(trials)]
    return _run_all(chain_trial, jobs)


def run_maxchain_experiment(
    ns: Iterable[int], ks: Iterable[int], p: float, beta: float, trials: int,
    master_seed: int = 0, max_len: int = 40,
) -> list[ChainTrialRecord]:
    jobs = [
        (n, k, p, beta, t, master_seed, max_len)
        for n in ns for k in ks for t in range(trials)
    ]
    return _run_all(maxchain_trial, jobs)


def summarize(records: Sequence[ChainTrialRecord], by_length: bool = True) -> list[dict]:
    """Mean and population std per cell, in first-appearance order.

    With ``by_length=False`` cells ignore ``chain_len`` (max-chain runs).
    """
    groups: dict[tuple, list[ChainTrialRecord]] = {}
    for r in records:
        key = (r.n, r.k, r.p, r.beta, r.chain_len if by_length else "")
        groups.setdefault(key, []).append(r)
    out = []
    for (n, k, p, beta, length), rs in groups.items():
        prefix = np.array([r.correct_prefix for r in rs], dtype=float)
        strong = np.array([r.strong for r in rs], dtype=float)
        blocks = sum(r.chain_len for r in rs)
        out.append({
            "n": n, "k": k, "p": p, "beta": beta, "chain_len": length, "trials": len(rs),
            "mean_correct_prefix": round(float(prefix.mean()), 4),
            "std_correct_prefix": round(float(prefix.std()), 4),
            "mean_strong": round(float(strong.mean()), 4),
            "std_strong": round(float(strong.std()), 4),
            "rounds_per_block": round(sum(r.rounds for r in rs) / max(blocks, 1), 4),
        })
    return out


def summary_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".summary" + (path.suffix or ".csv"))


def write_csv(records: Sequence[ChainTrialRecord], path: str | Path, by_length: bool = True) -> Path:
    """Write per-trial rows to ``path`` and per-cell stats next to it; returns the summary path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(FIELDS)
        w.writerows(r.row() for r in records)
    out = summary_path(path)
    with open(out, "w", newline="") as f:
        w = csv.DictWriter(f, SUMMARY_FIELDS)
        w.writeheader()
        w.writerows(summarize(records, by_length))
    return out


def read_csv(path: str | Path) -> list[ChainTrialRecord]:
    types = dict(n=int, k=int, p=float, beta=float, chain_len=int, trial=int, seed=int,
                 correct_prefix=int, strong=int, rounds=int)
    with open(path, newline="") as f:
        return [ChainTrialRecord(**{k: types[k](v) for k, v in row.items()})
                for row in csv.DictReader(f)]
