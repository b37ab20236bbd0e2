"""Discrete-time simulation of brain areas with lazily sampled random synapses.

A :class:`Brain` holds areas of ``n`` neurons of which ``k`` fire per step,
directed fibers between areas, and a recurrent fiber inside every ordinary
area. Connectivity is Erdos-Renyi with probability ``p``; the outgoing edges
of a source neuron across a fiber are drawn the first time that neuron fires
across the fiber and are frozen afterwards. Every row is drawn from its own
PCG64 substream keyed by ``(seed, src_index, dst_index, neuron)``, so the
order in which rows happen to be sampled never changes the result.

Weights start at 1 and are multiplied by ``1 + beta_dst`` each time the
source fired at ``t - 1`` and the target fires at ``t``. Weights are stored as
integer potentiation counts and looked up in a table built by repeated
multiplication, so a dense reference that multiplies in place gets the same
floating point values bit for bit.

Input accumulation order is fixed: fibers into an area are visited by
ascending source-area index (the recurrent fiber included), and within a
fiber the firing sources are visited in ascending neuron index.
"""

from __future__ import annotations

import dataclasses
import functools
from collections.abc import Iterable, Mapping

import numpy as np
from numba import njit

MAX_POTENTIATION = np.iinfo(np.uint16).max
TIE_BREAKS = ("index", "random")
# substream tag separating tie-break draws from synapse rows
_TIE_STREAM = 2**32 - 1


class SubstrateError(ValueError):
    """Raised on invalid brain construction or control calls."""


@dataclasses.dataclass(frozen=True)
class AreaParams:
    n: int
    k: int
    beta: float

    def __post_init__(self):
        if self.n <= 0:
            raise SubstrateError(f"n must be positive, got {self.n}")
        if not 0 < self.k <= self.n:
            raise SubstrateError(f"need 0 < k <= n, got k={self.k}, n={self.n}")
        if self.beta <= 0:
            raise SubstrateError(f"beta must be positive, got {self.beta}")


@dataclasses.dataclass(frozen=True)
class Assembly:
    """Immutable snapshot of a winner set in one area."""

    area: str
    neurons: tuple[int, ...]

    @classmethod
    def of(cls, area: str, neurons) -> Assembly:
        return cls(area, tuple(int(i) for i in np.sort(np.asarray(neurons))))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.neurons, dtype=np.int64)

    def __len__(self):
        return len(self.neurons)


def overlap(x, y) -> float:
    """Fraction of ``x`` that also lies in ``y``: ``|x & y| / max(|x|, 1)``."""
    x = np.asarray(x, dtype=np.int64).ravel()
    y = np.asarray(y, dtype=np.int64).ravel()
    if x.size == 0:
        return 0.0
    return np.intersect1d(x, y).size / x.size


def top_k(values: np.ndarray, k: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Indices of the ``k`` largest values.

    Ties at the cut go to the lowest indices, or to a uniform random subset
    of the tied indices when ``rng`` is given. Returns a sorted int64 array.
    """
    n = values.shape[0]
    if k >= n:
        return np.arange(n, dtype=np.int64)
    kth = np.partition(values, n - k)[n - k]
    above = np.flatnonzero(values > kth)
    ties = np.flatnonzero(values == kth)
    need = k - above.size
    if rng is None or ties.size == need:
        ties = ties[:need]
    else:
        ties = rng.choice(ties, size=need, replace=False)
    return np.union1d(above, ties).astype(np.int64)


@functools.lru_cache(maxsize=None)
def weight_table(beta: float) -> np.ndarray:
    """``table[m]`` is ``(1 + beta)`` multiplied into 1.0 exactly ``m`` times."""
    table = np.empty(MAX_POTENTIATION + 1, dtype=np.float64)
    w = 1.0
    factor = 1.0 + beta
    with np.errstate(over="ignore"):
        for m in range(table.size):
            table[m] = w
            w = w * factor
    table.flags.writeable = False
    return table


def sample_row(
    seed: int, src_index: int, dst_index: int, neuron: int, n_dst: int, p: float
) -> np.ndarray:
    """Draw the sorted out-neighbours of ``neuron`` across one fiber.

    The count is Binomial(candidates, p) and the targets are uniform without
    replacement. Recurrent fibers (``src_index == dst_index``) exclude
    self-loops.
    """
    rng = np.random.Generator(np.random.PCG64([seed, src_index, dst_index, neuron]))
    recurrent = src_index == dst_index
    candidates = n_dst - 1 if recurrent else n_dst
    if candidates <= 0 or p <= 0.0:
        return np.empty(0, dtype=np.int32)
    count = int(rng.binomial(candidates, p))
    row = rng.choice(candidates, size=count, replace=False)
    row.sort()
    if recurrent:
        row[row >= neuron] += 1
    return row.astype(np.int32)


@njit(cache=True, nogil=True)
def _accumulate(total, winners, offsets, lengths, targets, exps, table):
    for a in range(winners.shape[0]):
        i = winners[a]
        start = offsets[i]
        for e in range(start, start + lengths[i]):
            total[targets[e]] += table[exps[e]]


@njit(cache=True, nogil=True)
def _potentiate(winners, offsets, lengths, targets, exps, fired):
    for a in range(winners.shape[0]):
        i = winners[a]
        start = offsets[i]
        for e in range(start, start + lengths[i]):
            if fired[targets[e]] and exps[e] < 65535:
                exps[e] += 1


@dataclasses.dataclass(eq=False)
class Area:
    name: str
    index: int
    params: AreaParams
    explicit_assemblies: np.ndarray | None = None
    winners: np.ndarray = dataclasses.field(
        default_factory=lambda: np.empty(0, dtype=np.int64)
    )
    inhibited: bool = True
    clamped: bool = False

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def k(self) -> int:
        return self.params.k

    @property
    def beta(self) -> float:
        return self.params.beta

    @property
    def explicit(self) -> bool:
        return self.explicit_assemblies is not None

    def assembly(self) -> Assembly:
        return Assembly.of(self.name, self.winners)


class Fiber:
    """Directed random connectivity from one area to another.

    Rows live in one growing pool per fiber (CSR style): ``offsets[i]`` is the
    start of neuron ``i``'s row in ``targets``/``exps``, or -1 while unsampled.
    The index arrays are allocated on the first sampled row, so fibers that
    never carry activity cost nothing.
    """

    def __init__(self, src: Area, dst: Area, *, inhibited: bool = True):
        self.src = src.name
        self.dst = dst.name
        self.key = (src.index, dst.index)
        self.n_src = src.n
        self.n_dst = dst.n
        self.beta = dst.beta
        self.inhibited = inhibited
        self._offsets: np.ndarray | None = None
        self._lengths: np.ndarray | None = None
        self.targets = np.empty(0, dtype=np.int32)
        self.exps = np.empty(0, dtype=np.uint16)
        self.size = 0

    @property
    def offsets(self) -> np.ndarray:
        if self._offsets is None:
            self._offsets = np.full(self.n_src, -1, dtype=np.int64)
            self._lengths = np.zeros(self.n_src, dtype=np.int32)
        return self._offsets

    @property
    def lengths(self) -> np.ndarray:
        self.offsets
        return self._lengths

    @property
    def recurrent(self) -> bool:
        return self.src == self.dst

    def sampled(self, neuron: int) -> bool:
        return self._offsets is not None and bool(self._offsets[neuron] >= 0)

    @property
    def num_sampled(self) -> int:
        if self._offsets is None:
            return 0
        return int(np.count_nonzero(self._offsets >= 0))

    def ensure_rows(self, neurons: np.ndarray, seed: int, p: float) -> None:
        missing = neurons[self.offsets[neurons] < 0]
        if missing.size == 0:
            return
        rows = [
            sample_row(seed, self.key[0], self.key[1], int(i), self.n_dst, p)
            for i in missing
        ]
        needed = self.size + sum(r.size for r in rows)
        if needed > self.targets.size:
            capacity = max(needed, self.targets.size * 3 // 2, 1024)
            targets = np.empty(capacity, dtype=np.int32)
            exps = np.zeros(capacity, dtype=np.uint16)
            targets[: self.size] = self.targets[: self.size]
            exps[: self.size] = self.exps[: self.size]
            self.targets, self.exps = targets, exps
        for i, row in zip(missing, rows):
            self.offsets[i] = self.size
            self.lengths[i] = row.size
            self.targets[self.size : self.size + row.size] = row
            self.exps[self.size : self.size + row.size] = 0
            self.size += row.size

    def row(self, neuron: int) -> tuple[np.ndarray, np.ndarray]:
        """Targets and potentiation counts of a sampled row (views)."""
        start = self.offsets[neuron]
        if start < 0:
            raise SubstrateError(f"row {neuron} of fiber {self.src}->{self.dst} not sampled")
        stop = start + self.lengths[neuron]
        return self.targets[start:stop], self.exps[start:stop]

    def weights(self, neuron: int) -> tuple[np.ndarray, np.ndarray]:
        targets, exps = self.row(neuron)
        return targets, weight_table(self.beta)[exps]

    def accumulate(self, total: np.ndarray, winners: np.ndarray) -> None:
        _accumulate(
            total, winners, self.offsets, self.lengths, self.targets, self.exps,
            weight_table(self.beta),
        )

    def potentiate(self, pre: np.ndarray, post: np.ndarray) -> None:
        fired = np.zeros(self.n_dst, dtype=np.bool_)
        fired[post] = True
        _potentiate(pre, self.offsets, self.lengths, self.targets, self.exps, fired)

    @property
    def nbytes(self) -> int:
        index = 0 if self._offsets is None else self._offsets.nbytes + self._lengths.nbytes
        return index + self.targets.nbytes + self.exps.nbytes


def _names(areas: str | Iterable[str]) -> list[str]:
    return [areas] if isinstance(areas, str) else list(areas)


class Brain:
    """A collection of areas and fibers driven by synchronous cap-k steps.

    Areas start inhibited and fibers start inhibited. Inhibiting an area
    silences it: its winner set is cleared and any clamp is released.

    Args:
      p: Connection probability of every fiber and recurrent graph.
      seed: Root of all randomness in the brain.
      beta: Plasticity rate used by areas that do not set their own.
      tie_break: ``"index"`` gives tied neurons to the lowest index;
        ``"random"`` picks among them with a stream keyed by
        ``(seed, area, step)``. Index order makes every fresh assembly
        favour the same low-index neurons, so stored assemblies collide far
        more often than chance; programs use ``"random"``.
    """

    def __init__(self, p: float, seed: int = 0, beta: float = 0.1, tie_break: str = "index"):
        if not 0.0 <= p <= 1.0:
            raise SubstrateError(f"p must lie in [0, 1], got {p}")
        if seed < 0:
            raise SubstrateError("seed must be non-negative")
        if tie_break not in TIE_BREAKS:
            raise SubstrateError(f"tie_break must be one of {TIE_BREAKS}")
        self.tie_break = tie_break
        self.p = float(p)
        self.seed = int(seed)
        self.default_beta = float(beta)
        self.areas: dict[str, Area] = {}
        self._next_index = 0
        self.fibers: dict[tuple[str, str], Fiber] = {}
        self.step_counter = 0
        self.quiescent_fills: list[tuple[int, str]] = []

    # construction

    def add_area(self, name: str, n: int, k: int, beta: float | None = None) -> str:
        params = AreaParams(int(n), int(k), self.default_beta if beta is None else float(beta))
        area = self._register(name, params)
        self.fibers[(name, name)] = Fiber(area, area, inhibited=False)
        return name

    def add_explicit_area(
        self, name: str, num_assemblies: int, k: int, beta: float | None = None
    ) -> str:
        """Area whose assemblies are the fixed slices ``[i*k, (i+1)*k)``.

        Explicit areas have no recurrent fiber.
        """
        if num_assemblies < 1:
            raise SubstrateError("an explicit area needs at least one assembly")
        params = AreaParams(
            int(num_assemblies) * int(k), int(k),
            self.default_beta if beta is None else float(beta),
        )
        area = self._register(name, params)
        area.explicit_assemblies = np.arange(params.n, dtype=np.int64).reshape(
            num_assemblies, k
        )
        return name

    def _register(self, name: str, params: AreaParams) -> Area:
        if name in self.areas:
            raise SubstrateError(f"duplicate area name {name!r}")
        area = Area(name, self._next_index, params)
        self._next_index += 1
        self.areas[name] = area
        return area

    def connect(self, a: str, b: str) -> bool:
        """Create fibers ``a -> b`` and ``b -> a``; returns False if both existed."""
        if a == b:
            raise SubstrateError("recurrent connectivity is implicit; cannot connect an area to itself")
        src, dst = self.area(a), self.area(b)
        created = False
        for x, y in ((src, dst), (dst, src)):
            if (x.name, y.name) not in self.fibers:
                self.fibers[(x.name, y.name)] = Fiber(x, y)
                created = True
        return created

    def discard(self, areas: str | Iterable[str]) -> None:
        """Remove areas and every fiber touching them, releasing their synapses.

        Indices of the remaining areas do not change.
        """
        names = set(_names(areas))
        for name in names:
            self.area(name)
        self.fibers = {
            key: f for key, f in self.fibers.items() if not names & {f.src, f.dst}
        }
        for name in names:
            del self.areas[name]

    # lookup

    def area(self, name: str) -> Area:
        try:
            return self.areas[name]
        except KeyError:
            raise SubstrateError(f"unknown area {name!r}") from None

    def fiber(self, a: str, b: str) -> Fiber:
        try:
            return self.fibers[(a, b)]
        except KeyError:
            raise SubstrateError(f"no fiber {a!r} -> {b!r}") from None

    def winners(self, name: str) -> np.ndarray:
        return self.area(name).winners

    def incoming(self, name: str) -> list[Fiber]:
        """Fibers into ``name`` in accumulation order (by source area index)."""
        fibers = [f for (_, dst), f in self.fibers.items() if dst == name]
        return sorted(fibers, key=lambda f: f.key[0])

    @property
    def nbytes(self) -> int:
        return sum(f.nbytes for f in self.fibers.values())

    # control

    def set_area_inhibition(self, areas: str | Iterable[str], inhibited: bool) -> None:
        for name in _names(areas):
            area = self.area(name)
            area.inhibited = bool(inhibited)
            if inhibited:
                area.winners = np.empty(0, dtype=np.int64)
                area.clamped = False

    def set_fiber_inhibition(
        self, a: str, b: str, inhibited: bool, direction: str = "both"
    ) -> None:
        if direction not in ("both", "forward"):
            raise SubstrateError(f"direction must be 'both' or 'forward', got {direction!r}")
        if a == b:
            raise SubstrateError("recurrent fibers are not gated")
        pairs = [(a, b)] if direction == "forward" else [(a, b), (b, a)]
        for x, y in pairs:
            self.fiber(x, y).inhibited = bool(inhibited)

    def fire(self, name: str, neurons, *, clamp: bool = False) -> None:
        """Set the winners of a disinhibited area; ``clamp`` freezes them."""
        area = self.area(name)
        if area.inhibited:
            raise SubstrateError(f"area {name!r} is inhibited")
        neurons = np.unique(np.asarray(neurons, dtype=np.int64))
        if neurons.size != area.k or neurons[0] < 0 or neurons[-1] >= area.n:
            raise SubstrateError(f"need exactly {area.k} distinct neurons in [0, {area.n})")
        area.winners = neurons
        area.clamped = clamp

    def activate_assembly(self, name: str, index: int) -> None:
        """Clamp an explicit area to its ``index``-th fixed assembly (0-based)."""
        area = self.area(name)
        if not area.explicit:
            raise SubstrateError(f"area {name!r} has no explicit assemblies")
        if not 0 <= index < area.explicit_assemblies.shape[0]:
            raise SubstrateError(f"assembly index {index} out of range for {name!r}")
        self.fire(name, area.explicit_assemblies[index], clamp=True)

    def release(self, name: str) -> None:
        self.area(name).clamped = False

    # dynamics

    def _sources(self, name: str, allowed: Iterable[str] | None) -> list[Fiber]:
        allowed = None if allowed is None else set(allowed)
        out = []
        for f in self.incoming(name):
            src = self.areas[f.src]
            if f.inhibited or src.inhibited or src.winners.size == 0:
                continue
            if allowed is not None and f.src not in allowed:
                continue
            out.append(f)
        return out

    def _input(self, name: str, fibers: list[Fiber]) -> np.ndarray:
        total = np.zeros(self.areas[name].n, dtype=np.float64)
        for f in fibers:
            pre = self.areas[f.src].winners
            f.ensure_rows(pre, self.seed, self.p)
            f.accumulate(total, pre)
        return total

    def input_to(self, name: str, sources: Iterable[str] | None = None) -> np.ndarray:
        """Synaptic input ``name`` would receive now from firing sources."""
        return self._input(name, self._sources(name, sources))

    def tie_rng(self, name: str) -> np.random.Generator | None:
        """Tie-break stream for ``name`` at the current step, or None for index order."""
        if self.tie_break == "index":
            return None
        key = [self.seed, _TIE_STREAM, self.areas[name].index, self.step_counter]
        return np.random.Generator(np.random.PCG64(key))

    def select(self, name: str, total: np.ndarray) -> np.ndarray:
        return top_k(total, self.areas[name].k, self.tie_rng(name))

    def probe(self, name: str, sources: Iterable[str] | None = None) -> np.ndarray:
        """Winners ``name`` would select now, without changing any state."""
        return self.select(name, self.input_to(name, sources))

    def step(
        self,
        *,
        plasticity: bool = True,
        only: Mapping[str, Iterable[str]] | None = None,
        skip_undriven: bool = False,
    ) -> dict[str, np.ndarray]:
        """Advance every disinhibited, unclamped area by one synchronous step.

        Args:
          plasticity: Apply the multiplicative weight update.
          only: Restrict the update to these target areas, each listening only
            to the named source areas (itself included for recurrence).
          skip_undriven: Leave areas with no firing input source silent instead
            of filling them by tie-break.

        Returns:
          The new winner set of every area that was updated.
        """
        if only is not None:
            for name in only:
                if self.area(name).inhibited:
                    raise SubstrateError(f"area {name!r} is inhibited")
        names = list(only) if only is not None else [
            a.name for a in self.areas.values() if not a.inhibited
        ]
        new: dict[str, np.ndarray] = {}
        used: dict[str, list[Fiber]] = {}
        for name in names:
            area = self.areas[name]
            fibers = self._sources(name, None if only is None else only[name])
            if area.clamped:
                used[name] = fibers
                continue
            if not fibers and skip_undriven:
                continue
            total = self._input(name, fibers)
            if not total.any():
                self.quiescent_fills.append((self.step_counter, name))
            new[name] = self.select(name, total)
            used[name] = fibers
        if plasticity:
            for name, fibers in used.items():
                post = new.get(name, self.areas[name].winners)
                for f in fibers:
                    f.ensure_rows(self.areas[f.src].winners, self.seed, self.p)
                    f.potentiate(self.areas[f.src].winners, post)
        for name, winners in new.items():
            self.areas[name].winners = winners
        self.step_counter += 1
        return new
