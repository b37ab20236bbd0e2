"""Blocks-world planners: pop to the table, then rebuild.

Both planners share one schedule. Init stacks are visited in order and
popped down to what stays in place; goal stacks are then visited in order
and built bottom-up. The naive planner keeps only init bottoms in place; the
two-approximation keeps every matched common bottom run.

A backend supplies the facts the schedule needs. The symbolic backend reads
them off the configurations. The neural backend parses every stack into its
own register bank and gets every block id from a neural decode: heights come
from intersecting readouts, popped blocks from decoding the top before the
pop, put blocks from the goal chain readout, and put targets from decoding
the top of the stack being built.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Sequence
from typing import Any, Protocol

from .config import BrainConfig, ProgramConfig
from .stacks import (
    BLOCKS, StackRep, StackRegisters, add_registers, intersect_readouts, parse_stack,
    pop_top, put_block, read_chain,
)
from .substrate import Brain
from .world import BWConfig, Move, PutOn, ToTable, WorldError, common_suffix

NAIVE = "naive"
TWO_APPROX = "two_approx"


class PlanningError(RuntimeError):
    """A neural run could not produce its next move."""

    def __init__(self, message: str, trace: list[dict[str, Any]]):
        super().__init__(message)
        self.trace = trace


@dataclasses.dataclass(frozen=True)
class Match:
    init: int
    goal: int
    height: int


@dataclasses.dataclass
class Plan:
    """Moves plus, for neural runs, one trace record per neural event.

    ``readouts_ok`` is False when any chain readout stopped short of its
    symbolic length or any decode fell below threshold.
    """

    moves: list[Move]
    provenance: str
    trace: list[dict[str, Any]] = dataclasses.field(default_factory=list)
    readouts_ok: bool = True

    def __len__(self):
        return len(self.moves)

    def text(self) -> str:
        return "".join(f"{m}\n" for m in self.moves)


def _check_task(init: BWConfig, goal: BWConfig) -> None:
    if init.blocks != goal.blocks:
        missing = sorted(init.blocks ^ goal.blocks)
        raise WorldError(f"initial and goal block sets differ on {missing}")


def suffix_heights(init: BWConfig, goal: BWConfig) -> list[list[int]]:
    return [[common_suffix(a, b)[0] for b in goal.stacks] for a in init.stacks]


def match_stacks(
    init: BWConfig, goal: BWConfig, heights: Sequence[Sequence[int]] | None = None
) -> list[Match]:
    """Greedy pairing of init and goal stacks by common-suffix height.

    All pairs are compared. The tallest remaining pair is taken first; ties go
    to the lowest init index, then the lowest goal index. Pairs of height 0
    are never matched.
    """
    _check_task(init, goal)
    if heights is None:
        heights = suffix_heights(init, goal)
    pairs = sorted(
        (-h, i, j)
        for i, row in enumerate(heights)
        for j, h in enumerate(row)
        if h > 0
    )
    used_i, used_j, out = set(), set(), []
    for neg_h, i, j in pairs:
        if i in used_i or j in used_j:
            continue
        used_i.add(i)
        used_j.add(j)
        out.append(Match(i, j, -neg_h))
    return sorted(out, key=lambda m: m.init)


def misplaced_count(init: BWConfig, goal: BWConfig) -> int:
    """Blocks outside every matched common suffix."""
    return init.num_blocks - sum(m.height for m in match_stacks(init, goal))


class Backend(Protocol):
    def heights(self) -> list[list[int]]: ...
    def bottoms(self) -> list[int]: ...
    def popped_all(self) -> None: ...
    def goal_stack(self, j: int) -> list[int]: ...
    def pop(self, i: int) -> int: ...
    def fresh(self, j: int, bottom: int) -> Any: ...
    def init_handle(self, i: int) -> Any: ...
    def put(self, handle: Any, block: int) -> int: ...


class SymbolicBackend:
    def __init__(self, init: BWConfig, goal: BWConfig):
        self.init, self.goal = init, goal
        self.stacks = [list(s) for s in init.stacks]

    def heights(self):
        return suffix_heights(self.init, self.goal)

    def bottoms(self):
        return [s[-1] for s in self.stacks]

    def popped_all(self):
        pass

    def goal_stack(self, j):
        return list(self.goal.stacks[j])

    def pop(self, i):
        return self.stacks[i].pop(0)

    def fresh(self, j, bottom):
        return [bottom]

    def init_handle(self, i):
        return self.stacks[i]

    def put(self, handle, block):
        target = handle[0]
        handle.insert(0, block)
        return target


def _schedule(init: BWConfig, goal: BWConfig, backend: Backend, algo: str) -> list[Move]:
    if algo not in (NAIVE, TWO_APPROX):
        raise ValueError(f"unknown algorithm {algo!r}")
    matches = match_stacks(init, goal, backend.heights()) if algo == TWO_APPROX else []
    by_init = {m.init: m for m in matches}

    moves: list[Move] = []
    for i, stack in enumerate(init.stacks):
        keep = by_init[i].height if i in by_init else 1
        for _ in range(len(stack) - keep):
            moves.append(ToTable(backend.pop(i)))
    backend.popped_all()
    if algo == NAIVE:
        # every init stack is now its bottom block alone
        goal_bottoms = [s[-1] for s in goal.stacks]
        matches = [
            Match(i, goal_bottoms.index(b), 1)
            for i, b in enumerate(backend.bottoms())
            if b in goal_bottoms
        ]
    by_goal = {m.goal: m for m in matches}
    for j in range(len(goal.stacks)):
        target = backend.goal_stack(j)
        if j in by_goal:
            handle = backend.init_handle(by_goal[j].init)
            start = len(target) - by_goal[j].height - 1
        else:
            handle = backend.fresh(j, target[-1])
            start = len(target) - 2
        for pos in range(start, -1, -1):
            on = backend.put(handle, target[pos])
            moves.append(PutOn(target[pos], on))
    return moves


def plan_naive(init: BWConfig, goal: BWConfig, brain: NeuralBackend | None = None) -> Plan:
    """Pop every non-bottom block, then build every goal stack bottom-up."""
    return _plan(init, goal, NAIVE, brain)


def plan_2approx(init: BWConfig, goal: BWConfig, brain: NeuralBackend | None = None) -> Plan:
    """Pop only blocks above each matched common suffix, then rebuild above it."""
    return _plan(init, goal, TWO_APPROX, brain)


def _plan(init, goal, algo, neural):
    _check_task(init, goal)
    if neural is None:
        return Plan(_schedule(init, goal, SymbolicBackend(init, goal), algo), algo)
    moves = _schedule(init, goal, neural, algo)
    return Plan(moves, algo, neural.trace, neural.readouts_ok)


class NeuralBackend:
    """Runs a planner's moves through stack programs in one brain.

    One register bank per init stack (``I<i>_``), per goal stack
    (``G<j>_``), per goal stack built from the table (``F<j>_``), and one for
    the chain of popped blocks (``T_``). Banks are added when first needed.

    Args:
      init, goal: The task.
      cfg: Substrate parameters.
      program: Stack program knobs.
      table: Record popped blocks in the table chain.
    """

    def __init__(
        self,
        init: BWConfig,
        goal: BWConfig,
        cfg: BrainConfig = BrainConfig(),
        program: ProgramConfig = ProgramConfig(),
        *,
        table: bool = True,
    ):
        _check_task(init, goal)
        self.init, self.goal = init, goal
        self.cfg, self.program = cfg, program
        self.brain = Brain(cfg.p, cfg.seed, cfg.beta, cfg.tie_break)
        self.brain.add_explicit_area(BLOCKS, max(init.blocks), cfg.k)
        self.trace: list[dict[str, Any]] = []
        self.readouts_ok = True
        self._readouts: dict[str, list[int]] = {}
        self.init_reps = [self._parse(f"I{i}_", s) for i, s in enumerate(init.stacks)]
        # a goal chain is only ever read, so read it once and free its bank
        self.goal_reps = []
        for j, s in enumerate(goal.stacks):
            rep = self._parse(f"G{j}_", s)
            self._readout(rep)
            self.brain.discard(rep.regs.areas)
            self.goal_reps.append(rep)
        self.table = StackRep(self._bank("T_")) if table else None

    def _bank(self, prefix: str) -> StackRegisters:
        return add_registers(self.brain, prefix, self.cfg.n, self.cfg.k)

    def _parse(self, prefix: str, stack) -> StackRep:
        rep = parse_stack(self.brain, self._bank(prefix), stack, self.program)
        self.trace.append({"event": "parse", "bank": prefix, "stack": list(stack),
                           "rounds": list(rep.rounds)})
        return rep

    def _fail(self, message: str):
        self.trace.append({"event": "error", "message": message})
        raise PlanningError(message, self.trace)

    def _readout(self, rep: StackRep) -> list[int]:
        key = rep.regs.head
        if key not in self._readouts:
            r = read_chain(self.brain, rep, cfg=self.program)
            ok = len(r.blocks) == rep.length
            self.readouts_ok &= ok
            self.trace.append({"event": "readout", "bank": key, "blocks": r.blocks,
                               "scores": [round(float(x), 3) for x in r.scores], "ok": ok})
            self._readouts[key] = r.blocks
        return self._readouts[key]

    def _decode_top(self, rep: StackRep) -> tuple[int | None, float]:
        r = read_chain(self.brain, rep, 1, self.program)
        score = float(r.scores[0]) if r.scores else 0.0
        return (r.blocks[0] if r.blocks else None), score

    def heights(self):
        out = []
        for a in self.init_reps:
            row = []
            for b in self.goal_reps:
                x = intersect_readouts(self._readout(a), a.length, self._readout(b), b.length)
                # a short readout is a top prefix, so its bottom says nothing
                row.append(0 if x.degraded else x.height)
            out.append(row)
        self.trace.append({"event": "heights", "heights": out})
        return out

    def bottoms(self):
        out = []
        for i, rep in enumerate(self.init_reps):
            block, score = self._decode_top(rep)
            self.trace.append({"event": "bottom", "stack": i, "block": block,
                               "score": round(score, 3)})
            if block is None:
                self.readouts_ok = False
                self._fail(f"cannot decode the bottom of init stack {i} (overlap {score:.2f})")
            out.append(block)
        return out

    def popped_all(self):
        # the table chain is only a record; availability comes from the shadow
        if self.table is not None and self.table.length:
            self.trace.append({"event": "table", "blocks": self.table_blocks(),
                               "expected": list(self.table.shadow)})

    def goal_stack(self, j):
        rep = self.goal_reps[j]
        blocks = self._readout(rep)
        if len(blocks) != rep.length:
            self._fail(f"goal stack {j} read back as {blocks}, expected {rep.length} blocks")
        return blocks

    def pop(self, i):
        rep = self.init_reps[i]
        block = pop_top(self.brain, rep, self.table, self.program)
        _, decoded, score = rep.log[-1]
        self.trace.append({"event": "pop", "stack": i, "block": decoded,
                           "score": round(float(score), 3)})
        if score < self.program.decode_threshold:
            self.readouts_ok = False
            self._fail(f"pop from init stack {i} decoded block {block} at overlap {score:.2f}")
        return block

    def fresh(self, j, bottom):
        rep = StackRep(self._bank(f"F{j}_"))
        put_block(self.brain, rep, bottom, self.program)
        self.trace.append({"event": "start", "goal": j, "block": bottom})
        return rep

    def init_handle(self, i):
        return self.init_reps[i]

    def put(self, handle: StackRep, block: int) -> int:
        target, score = self._decode_top(handle)
        self.trace.append({"event": "put", "block": block, "target": target,
                           "score": round(score, 3)})
        if target is None:
            self.readouts_ok = False
            self._fail(f"cannot decode the top under block {block} (overlap {score:.2f})")
        put_block(self.brain, handle, block, self.program)
        return target

    def table_blocks(self) -> list[int]:
        """Blocks read back from the table chain, top (most recently popped) first."""
        if self.table is None:
            return []
        return read_chain(self.brain, self.table, cfg=self.program).blocks
