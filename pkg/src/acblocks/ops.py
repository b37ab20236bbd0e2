"""Assembly Calculus operations built from substrate steps."""

from __future__ import annotations

import dataclasses

from .substrate import Assembly, Brain, SubstrateError, overlap


class OperationError(RuntimeError):
    """An operation was called in a brain state that does not permit it."""


@dataclasses.dataclass(frozen=True)
class ProjectionResult:
    assembly: Assembly
    rounds: int
    converged: bool


def activate_block(brain: Brain, block: int, area: str = "Blocks") -> None:
    """Clamp the explicit assembly of ``block`` (1-based) in ``area``."""
    a = brain.area(area)
    if not a.explicit:
        raise OperationError(f"area {area!r} is not an explicit area")
    count = a.explicit_assemblies.shape[0]
    if not 1 <= block <= count:
        raise OperationError(f"block {block} outside 1..{count}")
    if a.inhibited:
        brain.set_area_inhibition(area, False)
    brain.activate_assembly(area, block - 1)


def project(
    brain: Brain,
    src: str,
    dst: str,
    max_rounds: int = 50,
    tol: float = 1.0,
    *,
    plasticity: bool = True,
) -> ProjectionResult:
    """Fire the assembly in ``src`` into ``dst`` until ``dst`` stabilizes.

    ``dst`` starts quiescent. Each round ``dst`` listens to ``src`` (held
    fixed) and to its own previous winners; every other area is left alone.
    Convergence means consecutive winner sets overlap by at least ``tol``.
    """
    s, d = brain.area(src), brain.area(dst)
    try:
        fiber = brain.fiber(src, dst)
    except SubstrateError as exc:
        raise OperationError(str(exc)) from None
    if fiber.inhibited:
        raise OperationError(f"fiber {src!r} -> {dst!r} is inhibited")
    if d.inhibited:
        raise OperationError(f"destination {dst!r} is inhibited")
    if s.inhibited or s.winners.size == 0:
        raise OperationError(f"source {src!r} is not firing")
    if d.clamped:
        brain.release(dst)
    d.winners = d.winners[:0]
    only = {dst: (src, dst)}
    previous = None
    converged = False
    rounds = 0
    while rounds < max_rounds:
        brain.step(plasticity=plasticity, only=only)
        rounds += 1
        current = d.winners
        if previous is not None and overlap(current, previous) >= tol:
            converged = True
            break
        previous = current
    return ProjectionResult(d.assembly(), rounds, converged)


def strong_project(
    brain: Brain,
    max_rounds: int = 30,
    tol: float = 1.0,
    *,
    min_rounds: int = 1,
    plasticity: bool = True,
) -> int:
    """Project simultaneously along every disinhibited fiber until all areas settle.

    Areas that have no firing input yet stay silent until activity reaches
    them. Settling is not checked before ``min_rounds`` rounds have run.
    Returns the number of rounds used.
    """
    active = [a for a in brain.areas.values() if not a.inhibited]
    if not active:
        raise OperationError("nothing is disinhibited")
    if not any(a.winners.size for a in active):
        raise OperationError("no disinhibited area is firing")
    rounds = 0
    while rounds < max_rounds:
        before = {a.name: a.winners for a in active if not a.clamped}
        brain.step(plasticity=plasticity, skip_undriven=True)
        rounds += 1
        settled = all(
            before[name].size > 0
            and overlap(brain.areas[name].winners, before[name]) >= tol
            for name in before
            if brain.areas[name].winners.size > 0
        )
        if settled and rounds >= min_rounds:
            break
    return rounds


def is_assembly(brain: Brain, area: str, threshold: float = 0.75) -> bool:
    """Whether the current winners of ``area`` reproduce themselves.

    Fires the winners through the recurrent fiber alone for one step with
    plasticity off and compares. Brain state is left untouched.
    """
    a = brain.area(area)
    if a.winners.size == 0 or (area, area) not in brain.fibers:
        return False
    fiber = brain.fibers[(area, area)]
    fiber.ensure_rows(a.winners, brain.seed, brain.p)
    total = brain._input(area, [fiber])
    return overlap(brain.select(area, total), a.winners) >= threshold
