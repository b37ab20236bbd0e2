"""Stacks of blocks stored as chains of assemblies.

A register bank is a Head area and three Node areas. Node areas form a
triangle, every Node area is wired to the shared explicit Blocks area, and
Head is wired to every Node area. A parsed stack is a chain: the Head
assembly points at the top block's assembly in some Node area, and each
chain element points at the next one in the following Node area (mod 3).

Between programs every area and fiber of a bank is inhibited; programs
disinhibit exactly what they need and inhibit it again on exit.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Sequence

import numpy as np

from .config import BrainConfig, ProgramConfig
from .ops import activate_block, project, strong_project, is_assembly
from .substrate import Assembly, Brain
from .world import common_suffix

NUM_NODES = 3
BLOCKS = "Blocks"


class StackError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class StackRegisters:
    blocks: str
    head: str
    nodes: tuple[str, str, str]

    @property
    def areas(self) -> tuple[str, ...]:
        return (self.head, *self.nodes)

    def node(self, i: int) -> str:
        return self.nodes[i % NUM_NODES]

    def pairs(self) -> list[tuple[str, str]]:
        out = [(self.head, node) for node in self.nodes]
        out += [(self.nodes[i], self.nodes[(i + 1) % NUM_NODES]) for i in range(NUM_NODES)]
        out += [(node, self.blocks) for node in self.nodes]
        return out


@dataclasses.dataclass
class StackRep:
    """Handle on a chain in one register bank.

    ``length`` and ``shadow`` are symbolic bookkeeping: the shadow is the
    stack (top first) the neural operations were asked to build.
    """

    regs: StackRegisters
    head_node: int | None = None
    length: int = 0
    head_assembly: Assembly | None = None
    shadow: list[int] = dataclasses.field(default_factory=list)
    rounds: list[int] = dataclasses.field(default_factory=list)
    log: list[tuple[str, int, float]] = dataclasses.field(default_factory=list)


# the table chain is stored exactly like a stack, in its own bank
TableRep = StackRep


@dataclasses.dataclass(frozen=True)
class ChainReadout:
    blocks: list[int]
    scores: list[float]


@dataclasses.dataclass(frozen=True)
class Intersection:
    height: int
    top_common: int | None
    degraded: bool = False


def add_registers(
    brain: Brain, prefix: str, n: int, k: int, beta: float | None = None,
    blocks: str = BLOCKS,
) -> StackRegisters:
    regs = StackRegisters(
        blocks, f"{prefix}Head", tuple(f"{prefix}Node{i}" for i in range(NUM_NODES))
    )
    for name in regs.areas:
        brain.add_area(name, n, k, beta)
    for a, b in regs.pairs():
        brain.connect(a, b)
    return regs


def build_brain(
    cfg: BrainConfig, num_blocks: int, banks: Sequence[str] = ("",)
) -> tuple[Brain, dict[str, StackRegisters]]:
    """A brain with a Blocks area for ``num_blocks`` blocks and one bank per prefix."""
    brain = Brain(cfg.p, cfg.seed, cfg.beta, cfg.tie_break)
    brain.add_explicit_area(BLOCKS, num_blocks, cfg.k)
    regs = {prefix: add_registers(brain, prefix, cfg.n, cfg.k) for prefix in banks}
    return brain, regs


def _quiesce(brain: Brain, regs: StackRegisters) -> None:
    for a, b in regs.pairs():
        brain.set_fiber_inhibition(a, b, True)
    brain.set_area_inhibition([*regs.areas, regs.blocks], True)


def _open(brain: Brain, areas=(), fibers=(), direction="both") -> None:
    for name in areas:
        brain.set_area_inhibition(name, False)
    for a, b in fibers:
        brain.set_fiber_inhibition(a, b, False, direction)


def _close(brain: Brain, areas=(), fibers=(), direction="both") -> None:
    for a, b in fibers:
        brain.set_fiber_inhibition(a, b, True, direction)
    for name in areas:
        brain.set_area_inhibition(name, True)


def _check_blocks(brain: Brain, regs: StackRegisters, blocks: Sequence[int]) -> None:
    count = brain.area(regs.blocks).explicit_assemblies.shape[0]
    if len(set(blocks)) != len(blocks):
        raise StackError(f"duplicate blocks in {list(blocks)}")
    for b in blocks:
        if not 1 <= b <= count:
            raise StackError(f"unknown block {b}; the Blocks area holds 1..{count}")


def decode_block(brain: Brain, blocks: str = BLOCKS) -> tuple[int, float]:
    """Best-matching explicit assembly for the current Blocks winners."""
    area = brain.area(blocks)
    if area.winners.size == 0:
        return 0, 0.0
    counts = np.bincount(area.winners // area.k, minlength=area.explicit_assemblies.shape[0])
    best = int(np.argmax(counts))
    return best + 1, counts[best] / area.k


def _bind(brain: Brain, cfg: ProgramConfig, rounds: int | None = None) -> int:
    if rounds is not None:
        return strong_project(brain, rounds, cfg.strong_tol, min_rounds=rounds)
    return strong_project(
        brain, cfg.strong_rounds, cfg.strong_tol, min_rounds=cfg.strong_min_rounds
    )


def _bind_first(brain: Brain, rep: StackRep, block: int, cfg: ProgramConfig) -> None:
    """Start a chain at Node0 (first lines of the parser)."""
    regs = rep.regs
    head, node = regs.head, regs.node(0)
    _open(brain, (regs.blocks, head, node), ((head, node), (node, regs.blocks)))
    activate_block(brain, block, regs.blocks)
    rep.rounds.append(_bind(brain, cfg))
    rep.head_assembly = brain.area(head).assembly()
    rep.head_node = 0
    _close(brain, (head,), ((head, node), (node, regs.blocks)))


def parse_stack(
    brain: Brain, regs: StackRegisters, stack: Sequence[int],
    cfg: ProgramConfig = ProgramConfig(),
) -> StackRep:
    """Build the chain for ``stack`` (top block first)."""
    stack = [int(b) for b in stack]
    if not stack:
        raise StackError("cannot parse an empty stack")
    _check_blocks(brain, regs, stack)
    _quiesce(brain, regs)
    rep = StackRep(regs)
    _bind_first(brain, rep, stack[0], cfg)
    for i in range(2, len(stack) + 1):
        prev, cur = regs.node(i - 2), regs.node(i - 1)
        fibers = ((prev, cur), (cur, regs.blocks))
        _open(brain, (cur,), fibers)
        activate_block(brain, stack[i - 1], regs.blocks)
        rep.rounds.append(_bind(brain, cfg))
        _close(brain, (prev,), fibers)
    _close(brain, (regs.blocks, regs.node(len(stack) - 1)))
    rep.length = len(stack)
    rep.shadow = list(stack)
    _quiesce(brain, regs)
    return rep


def _evoke_top(brain: Brain, rep: StackRep, cfg: ProgramConfig) -> str:
    """Fire the Head assembly and recall the top element's Node assembly."""
    regs = rep.regs
    node = regs.node(rep.head_node)
    _open(brain, (regs.head, node), ((regs.head, node),), "forward")
    brain.fire(regs.head, rep.head_assembly.array, clamp=True)
    project(brain, regs.head, node, cfg.readout_rounds, plasticity=False)
    _close(brain, (regs.head,), ((regs.head, node),), "forward")
    return node


def _decode(brain: Brain, regs: StackRegisters, node: str) -> tuple[int, float]:
    _open(brain, (regs.blocks,), ((node, regs.blocks),), "forward")
    project(brain, node, regs.blocks, 1, plasticity=False)
    result = decode_block(brain, regs.blocks)
    _close(brain, (regs.blocks,), ((node, regs.blocks),), "forward")
    return result


def _advance(brain: Brain, regs: StackRegisters, j: int, cfg: ProgramConfig) -> int:
    """Recall the chain element after the one firing in Node ``j``."""
    src, dst = regs.node(j), regs.node(j + 1)
    _open(brain, (dst,), ((src, dst),), "forward")
    project(brain, src, dst, cfg.readout_rounds, plasticity=False)
    _close(brain, (src,), ((src, dst),), "forward")
    return (j + 1) % NUM_NODES


def read_chain(
    brain: Brain, rep: StackRep, max_len: int | None = None,
    cfg: ProgramConfig = ProgramConfig(),
) -> ChainReadout:
    """Walk the chain without plasticity, decoding one block per element.

    Stops at the first element whose best overlap is below the decode
    threshold; ``scores`` includes that failing overlap.
    """
    limit = rep.length if max_len is None else max_len
    if rep.length == 0 or rep.head_assembly is None or limit <= 0:
        return ChainReadout([], [])
    regs = rep.regs
    _quiesce(brain, regs)
    j = rep.head_node
    _evoke_top(brain, rep, cfg)
    blocks, scores = [], []
    for step in range(limit):
        block, score = _decode(brain, regs, regs.node(j))
        scores.append(score)
        if score < cfg.decode_threshold:
            break
        blocks.append(block)
        if step + 1 < limit:
            j = _advance(brain, regs, j, cfg)
    _quiesce(brain, regs)
    return ChainReadout(blocks, scores)


def readout(
    brain: Brain, rep: StackRep, max_len: int | None = None,
    cfg: ProgramConfig = ProgramConfig(),
) -> list[int]:
    return read_chain(brain, rep, max_len, cfg).blocks


def count_strong_assemblies(
    brain: Brain, rep: StackRep, cfg: ProgramConfig = ProgramConfig()
) -> int:
    """Number of chain elements, as recalled during readout, that pass ``is_assembly``.

    Walks the full symbolic length of the chain regardless of decode
    failures.
    """
    if rep.length == 0 or rep.head_assembly is None:
        return 0
    regs = rep.regs
    _quiesce(brain, regs)
    j = rep.head_node
    _evoke_top(brain, rep, cfg)
    strong = 0
    for step in range(rep.length):
        strong += is_assembly(brain, regs.node(j), cfg.strong_threshold)
        if step + 1 < rep.length:
            j = _advance(brain, regs, j, cfg)
    _quiesce(brain, regs)
    return strong


def pop_top(
    brain: Brain, rep: StackRep, table: TableRep | None = None,
    cfg: ProgramConfig = ProgramConfig(),
) -> int:
    """Remove the top element and return its decoded block.

    The element below the top is recalled through the chain and bound to a
    fresh Head assembly. The popped block is appended to ``table`` if given.
    """
    if rep.length == 0:
        raise StackError("pop from an empty stack")
    regs = rep.regs
    _quiesce(brain, regs)
    j = rep.head_node
    node = _evoke_top(brain, rep, cfg)
    block, score = _decode(brain, regs, node)
    if rep.length == 1:
        rep.head_assembly = None
        rep.head_node = None
    else:
        j = _advance(brain, regs, j, cfg)
        node = regs.node(j)
        _open(brain, (regs.head,), ((regs.head, node),))
        rep.rounds.append(_bind(brain, cfg))
        rep.head_assembly = brain.area(regs.head).assembly()
        rep.head_node = j
    rep.length -= 1
    if rep.shadow:
        rep.shadow.pop(0)
    rep.log.append(("pop", block, score))
    _quiesce(brain, regs)
    if table is not None:
        put_block(brain, table, block, cfg)
    return block


def put_block(
    brain: Brain, rep: StackRep, block: int, cfg: ProgramConfig = ProgramConfig()
) -> None:
    """Push ``block`` on top of the chain."""
    regs = rep.regs
    _check_blocks(brain, regs, [block])
    if block in rep.shadow:
        raise StackError(f"block {block} is already in this stack")
    _quiesce(brain, regs)
    if rep.length == 0:
        _bind_first(brain, rep, block, cfg)
    else:
        old = regs.node(rep.head_node)
        new_index = (rep.head_node - 1) % NUM_NODES
        new = regs.node(new_index)
        _evoke_top(brain, rep, cfg)
        # hold the recalled top fixed; left free it drifts toward whatever
        # the new element used to point at
        brain.fire(old, brain.area(old).winners, clamp=True)
        activate_block(brain, block, regs.blocks)
        _open(brain, (new,), ((regs.blocks, new),), "forward")
        project(brain, regs.blocks, new, cfg.project_rounds)
        _open(brain, (regs.head,), ((new, regs.head),), "forward")
        project(brain, new, regs.head, cfg.project_rounds)
        _open(brain, (), ((regs.blocks, new), (new, regs.head)))
        _open(brain, (), ((new, old),), "forward")
        rep.rounds.append(_bind(brain, cfg, cfg.put_rounds))
        rep.head_assembly = brain.area(regs.head).assembly()
        rep.head_node = new_index
    rep.length += 1
    rep.shadow.insert(0, block)
    rep.log.append(("put", block, 1.0))
    _quiesce(brain, regs)


def intersect(
    brain: Brain, rep_a: StackRep, rep_b: StackRep, cfg: ProgramConfig = ProgramConfig()
) -> Intersection:
    """Height and highest block of the common bottom run of two chains.

    Both chains are read top-down and compared from their bottoms upward.
    """
    a = readout(brain, rep_a, cfg=cfg)
    b = readout(brain, rep_b, cfg=cfg)
    return intersect_readouts(a, rep_a.length, b, rep_b.length)


def intersect_readouts(
    a: Sequence[int], length_a: int, b: Sequence[int], length_b: int
) -> Intersection:
    """Intersection of two decoded chains; short readouts mark the result degraded."""
    degraded = len(a) < length_a or len(b) < length_b
    height, top = common_suffix(a, b)
    return Intersection(height, top, degraded)
