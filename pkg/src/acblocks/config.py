"""Parameter bundles shared by programs, planners and experiments."""

from __future__ import annotations

import dataclasses


@dataclasses.dataclass(frozen=True)
class BrainConfig:
    """Substrate parameters; every Head/Node area gets the same ``n``, ``k``, ``beta``.

    Programs break winner ties at random (see :class:`acblocks.substrate.Brain`).
    """

    n: int = 100_000
    k: int = 50
    p: float = 0.1
    beta: float = 0.1
    seed: int = 0
    tie_break: str = "random"

    def replace(self, **changes) -> BrainConfig:
        return dataclasses.replace(self, **changes)


@dataclasses.dataclass(frozen=True)
class ProgramConfig:
    """Knobs of the stack programs.

    Attributes:
      strong_rounds: Cap on rounds of one strong projection.
      strong_tol: Consecutive-overlap level at which a strong projection stops.
      strong_min_rounds: Rounds a strong projection runs before it may stop.
        Equal to ``strong_rounds`` by default, which makes every binding
        step a fixed-length burst; stopping at the first exact repeat leaves
        the chain links too weak to read back.
      put_rounds: Fixed length of the binding burst of a put. Longer than a
        parse burst, so that a block put back where it sat before being
        popped links to its new successor more strongly than to its old one.
      project_rounds: Cap on rounds of a plastic projection.
      readout_rounds: Cap on rounds of a plasticity-free projection while
        walking a chain.
      decode_threshold: Minimum overlap with the best block assembly for a
        decode to count.
      strong_threshold: ``is_assembly`` level used for the strong-assembly count.
    """

    strong_rounds: int = 30
    strong_tol: float = 1.0
    strong_min_rounds: int = 30
    put_rounds: int = 45
    project_rounds: int = 50
    readout_rounds: int = 20
    decode_threshold: float = 0.75
    strong_threshold: float = 0.95
