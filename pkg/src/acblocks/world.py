"""Symbolic blocks world: configurations, moves, plan text and exact search."""

from __future__ import annotations

import dataclasses
from collections import deque
from collections.abc import Iterable, Iterator, Sequence

Stack = tuple[int, ...]


class WorldError(ValueError):
    pass


class MoveError(WorldError):
    pass


@dataclasses.dataclass(frozen=True, eq=False)
class BWConfig:
    """A set of stacks, each listed top block first.

    Equality ignores the order of the stacks.
    """

    stacks: tuple[Stack, ...]

    def __post_init__(self):
        stacks = tuple(tuple(int(b) for b in s) for s in self.stacks)
        object.__setattr__(self, "stacks", stacks)
        seen: set[int] = set()
        for s in stacks:
            if not s:
                raise WorldError("empty stacks are not stored")
            for b in s:
                if b in seen:
                    raise WorldError(f"block {b} appears twice")
                seen.add(b)

    @classmethod
    def of(cls, *stacks: Sequence[int]) -> BWConfig:
        return cls(tuple(tuple(s) for s in stacks))

    @property
    def blocks(self) -> frozenset[int]:
        return frozenset(b for s in self.stacks for b in s)

    @property
    def key(self) -> frozenset[Stack]:
        return frozenset(self.stacks)

    @property
    def num_blocks(self) -> int:
        return sum(len(s) for s in self.stacks)

    def canonical(self) -> BWConfig:
        """Same configuration with stacks sorted by bottom block."""
        return BWConfig(tuple(sorted(self.stacks, key=lambda s: s[-1])))

    def tops(self) -> list[int]:
        return [s[0] for s in self.stacks]

    def __eq__(self, other):
        if not isinstance(other, BWConfig):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __str__(self):
        return " | ".join(" ".join(map(str, s)) for s in self.stacks)


@dataclasses.dataclass(frozen=True)
class ToTable:
    block: int

    def __str__(self):
        return f"TABLE {self.block}"


@dataclasses.dataclass(frozen=True)
class PutOn:
    block: int
    target: int

    def __str__(self):
        return f"PUT {self.block} ON {self.target}"


Move = ToTable | PutOn


def apply_move(config: BWConfig, move: Move) -> BWConfig:
    stacks = list(config.stacks)
    where = {s[0]: i for i, s in enumerate(stacks)}
    if isinstance(move, ToTable):
        i = where.get(move.block)
        if i is None:
            raise MoveError(f"block {move.block} is not a top")
        if len(stacks[i]) == 1:
            raise MoveError(f"block {move.block} is already on the table")
        stacks[i] = stacks[i][1:]
        stacks.append((move.block,))
    elif isinstance(move, PutOn):
        i = where.get(move.block)
        if i is None or len(stacks[i]) != 1:
            raise MoveError(f"block {move.block} is not alone on the table")
        j = where.get(move.target)
        if j is None or j == i:
            raise MoveError(f"target {move.target} is not a top")
        stacks[j] = (move.block, *stacks[j])
        del stacks[i]
    else:
        raise TypeError(f"not a move: {move!r}")
    return BWConfig(tuple(stacks))


def legal_moves(config: BWConfig) -> Iterator[Move]:
    tops = config.tops()
    singles = [s[0] for s in config.stacks if len(s) == 1]
    for s in config.stacks:
        if len(s) > 1:
            yield ToTable(s[0])
    for b in singles:
        for t in tops:
            if t != b:
                yield PutOn(b, t)


@dataclasses.dataclass(frozen=True)
class Validation:
    ok: bool
    failed_index: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def validate_plan(init: BWConfig, goal: BWConfig, moves: Iterable[Move]) -> Validation:
    """Replay ``moves`` from ``init``; ok iff every move applies and the result is ``goal``."""
    config = init
    i = -1
    for i, move in enumerate(moves):
        try:
            config = apply_move(config, move)
        except MoveError as exc:
            return Validation(False, i, str(exc))
    if config != goal:
        return Validation(False, i + 1, f"ends in {config}, not {goal}")
    return Validation(True)


def format_plan(moves: Iterable[Move]) -> str:
    return "".join(f"{m}\n" for m in moves)


def parse_move(line: str) -> Move:
    parts = line.split()
    try:
        if len(parts) == 2 and parts[0] == "TABLE":
            return ToTable(int(parts[1]))
        if len(parts) == 4 and parts[0] == "PUT" and parts[2] == "ON":
            return PutOn(int(parts[1]), int(parts[3]))
    except ValueError:
        pass
    raise WorldError(f"bad move line {line!r}")


def parse_plan(text: str) -> list[Move]:
    moves = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            moves.append(parse_move(line))
        except WorldError as exc:
            raise WorldError(f"line {lineno}: {exc}") from None
    return moves


def common_suffix(a: Sequence[int], b: Sequence[int]) -> tuple[int, int | None]:
    """Length and highest block of the shared bottom run of two top-first stacks."""
    h = 0
    while h < len(a) and h < len(b) and a[-1 - h] == b[-1 - h]:
        h += 1
    return h, (a[-h] if h else None)


def distances_from(goal: BWConfig) -> dict[frozenset[Stack], int]:
    """Move distance from every reachable configuration to ``goal``.

    Every move has an inverse move, so the state graph is undirected and a
    single search from ``goal`` covers all starting configurations.
    """
    dist = {goal.key: 0}
    queue = deque([goal])
    while queue:
        config = queue.popleft()
        d = dist[config.key]
        for move in legal_moves(config):
            nxt = apply_move(config, move)
            if nxt.key not in dist:
                dist[nxt.key] = d + 1
                queue.append(nxt)
    return dist


def optimal_plan_length(init: BWConfig, goal: BWConfig, max_blocks: int = 7) -> int:
    """Exact minimum number of moves, by breadth-first search."""
    if init.blocks != goal.blocks:
        raise WorldError("initial and goal configurations hold different blocks")
    if init.num_blocks > max_blocks:
        raise WorldError(f"{init.num_blocks} blocks is too many for exact search (max {max_blocks})")
    if init == goal:
        return 0
    seen = {init.key}
    frontier = [init]
    depth = 0
    while frontier:
        depth += 1
        nxt_frontier = []
        for config in frontier:
            for move in legal_moves(config):
                nxt = apply_move(config, move)
                if nxt == goal:
                    return depth
                if nxt.key not in seen:
                    seen.add(nxt.key)
                    nxt_frontier.append(nxt)
        frontier = nxt_frontier
    raise WorldError("goal unreachable")  # pragma: no cover


def all_configs(blocks: Sequence[int]) -> list[BWConfig]:
    """Every configuration of ``blocks``, each exactly once."""
    out: list[BWConfig] = []

    def place(i: int, stacks: list[list[int]]):
        if i == len(blocks):
            out.append(BWConfig(tuple(tuple(s) for s in stacks)))
            return
        b = blocks[i]
        stacks.append([b])
        place(i + 1, stacks)
        stacks.pop()
        for s in stacks:
            for pos in range(len(s) + 1):
                s.insert(pos, b)
                place(i + 1, stacks)
                del s[pos]

    place(0, [])
    return out
