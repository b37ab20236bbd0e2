"""Task files and random task generation.

A task file has an ``initial:`` section and a ``goal:`` section. Each
following line is one stack, block ids separated by spaces, top block first.
``#`` starts a comment; blank lines are ignored::

    # the stacks of the running example
    initial:
    4 5 3 1 2
    goal:
    4 1 2
    3 5
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .world import BWConfig, WorldError

SECTIONS = ("initial", "goal")


class TaskFormatError(WorldError):
    pass


@dataclasses.dataclass(frozen=True)
class TaskFile:
    initial: BWConfig
    goal: BWConfig

    def __post_init__(self):
        check_task(self.initial, self.goal)

    @property
    def num_blocks(self) -> int:
        return self.initial.num_blocks


def check_task(initial: BWConfig, goal: BWConfig) -> None:
    if not initial.stacks:
        raise TaskFormatError("the initial configuration is empty")
    a, b = initial.blocks, goal.blocks
    for block in sorted(a - b):
        raise TaskFormatError(f"goal is missing block {block}")
    for block in sorted(b - a):
        raise TaskFormatError(f"initial configuration is missing block {block}")
    expected = set(range(1, len(a) + 1))
    if a != expected:
        gaps = sorted(expected - a)
        raise TaskFormatError(f"block ids must be 1..{len(a)}; missing {gaps}")


def parse_task(text: str) -> TaskFile:
    stacks: dict[str, list[tuple[int, ...]]] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.endswith(":"):
            name = line[:-1].strip().lower()
            if name not in SECTIONS:
                raise TaskFormatError(f"line {lineno}: unknown section {name!r}")
            if name in stacks:
                raise TaskFormatError(f"line {lineno}: section {name!r} repeated")
            section = name
            stacks[name] = []
            continue
        if section is None:
            raise TaskFormatError(f"line {lineno}: stack before any section header")
        try:
            stack = tuple(int(tok) for tok in line.split())
        except ValueError:
            raise TaskFormatError(f"line {lineno}: non-integer token in {line!r}") from None
        if any(b < 1 for b in stack):
            raise TaskFormatError(f"line {lineno}: block ids must be positive")
        stacks[section].append(stack)
    for name in SECTIONS:
        if name not in stacks:
            raise TaskFormatError(f"missing section {name!r}")
    try:
        return TaskFile(BWConfig(tuple(stacks["initial"])), BWConfig(tuple(stacks["goal"])))
    except TaskFormatError:
        raise
    except WorldError as exc:
        raise TaskFormatError(str(exc)) from None


def format_config(config: BWConfig) -> str:
    return "".join(" ".join(map(str, s)) + "\n" for s in config.canonical().stacks)


def serialize_task(task: TaskFile) -> str:
    """Canonical text: stacks in each section sorted by bottom block id."""
    return "initial:\n" + format_config(task.initial) + "goal:\n" + format_config(task.goal)


def random_config(
    blocks, max_stacks: int, max_height: int, rng: np.random.Generator
) -> BWConfig:
    """Place blocks one at a time, on the table or on top of a stack.

    Each block picks uniformly among the placements the bounds still allow.
    Not uniform over configurations.
    """
    blocks = list(blocks)
    if len(blocks) > max_stacks * max_height:
        raise TaskFormatError(
            f"{len(blocks)} blocks do not fit in {max_stacks} stacks of height {max_height}"
        )
    stacks: list[list[int]] = []
    # every placement uses one of the max_stacks * max_height slots, so the
    # size check above guarantees an option always exists
    for block in blocks:
        options = [i for i, s in enumerate(stacks) if len(s) < max_height]
        if len(stacks) < max_stacks:
            options.append(-1)
        choice = options[int(rng.integers(len(options)))]
        if choice == -1:
            stacks.append([block])
        else:
            stacks[choice].insert(0, block)
    return BWConfig(tuple(tuple(s) for s in stacks))


def random_task(s: int, max_stacks: int, max_height: int, seed: int) -> TaskFile:
    """Two independent random configurations of blocks ``1..s``."""
    if s < 1 or max_stacks < 1 or max_height < 1:
        raise TaskFormatError("s, max_stacks and max_height must be positive")
    rng = np.random.default_rng(seed)
    configs = []
    for _ in range(2):
        order = rng.permutation(np.arange(1, s + 1))
        configs.append(random_config(order.tolist(), max_stacks, max_height, rng))
    return TaskFile(*configs)
