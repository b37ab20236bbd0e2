"""Eager dense reference brain for small areas, used as a test oracle.

Every fiber is a full ``n_src x n_dst`` weight matrix drawn up front with the
same per-row streams as :func:`acblocks.substrate.sample_row`. Weights are
multiplied in place, inputs are summed row by row in the same order as the
lazy brain, and winners are picked by a sort rather than a partition, so any
disagreement with :class:`acblocks.substrate.Brain` points at the lazy code.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping

import numpy as np

from .substrate import _TIE_STREAM, SubstrateError, sample_row


def dense_top_k(values: np.ndarray, k: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Indices of the ``k`` largest values, sorted.

    Ties at the cut go to the lowest indices, or with ``rng`` to a random
    subset of the tied indices (drawn from them in ascending order).
    """
    order = np.lexsort((np.arange(values.size), -values))
    if rng is None or k >= values.size:
        return np.sort(order[:k]).astype(np.int64)
    cut = values[order[k - 1]]
    above = order[: k][values[order[:k]] > cut]
    tied = np.sort(np.flatnonzero(values == cut))
    need = k - above.size
    if tied.size > need:
        tied = rng.choice(tied, size=need, replace=False)
    return np.sort(np.concatenate([above, tied])).astype(np.int64)


class DenseBrain:
    """Dense mirror of the lazy brain's API, limited to small ``n``."""

    MAX_N = 5000

    def __init__(self, p: float, seed: int = 0, beta: float = 0.1, tie_break: str = "index"):
        self.tie_break = tie_break
        self.p = float(p)
        self.seed = int(seed)
        self.default_beta = float(beta)
        self.order: list[str] = []
        self.n: dict[str, int] = {}
        self.k: dict[str, int] = {}
        self.beta: dict[str, float] = {}
        self.explicit: dict[str, bool] = {}
        self.winners: dict[str, np.ndarray] = {}
        self.inhibited: dict[str, bool] = {}
        self.clamped: dict[str, bool] = {}
        self.weights: dict[tuple[str, str], np.ndarray] = {}
        self.fiber_inhibited: dict[tuple[str, str], bool] = {}
        self.step_counter = 0

    def _register(self, name, n, k, beta, explicit):
        if n > self.MAX_N:
            raise SubstrateError(f"dense areas are limited to n <= {self.MAX_N}")
        self.order.append(name)
        self.n[name], self.k[name] = n, k
        self.beta[name] = self.default_beta if beta is None else float(beta)
        self.explicit[name] = explicit
        self.winners[name] = np.empty(0, dtype=np.int64)
        self.inhibited[name] = True
        self.clamped[name] = False

    def _matrix(self, a: str, b: str) -> np.ndarray:
        ia, ib = self.order.index(a), self.order.index(b)
        w = np.zeros((self.n[a], self.n[b]), dtype=np.float64)
        for i in range(self.n[a]):
            w[i, sample_row(self.seed, ia, ib, i, self.n[b], self.p)] = 1.0
        return w

    def add_area(self, name, n, k, beta=None):
        self._register(name, n, k, beta, False)
        self.weights[(name, name)] = self._matrix(name, name)
        return name

    def add_explicit_area(self, name, num_assemblies, k, beta=None):
        self._register(name, num_assemblies * k, k, beta, True)
        return name

    def connect(self, a, b):
        for x, y in ((a, b), (b, a)):
            if (x, y) not in self.weights:
                self.weights[(x, y)] = self._matrix(x, y)
                self.fiber_inhibited[(x, y)] = True

    def set_area_inhibition(self, areas, inhibited):
        for name in [areas] if isinstance(areas, str) else areas:
            self.inhibited[name] = inhibited
            if inhibited:
                self.winners[name] = np.empty(0, dtype=np.int64)
                self.clamped[name] = False

    def set_fiber_inhibition(self, a, b, inhibited, direction="both"):
        pairs = [(a, b)] if direction == "forward" else [(a, b), (b, a)]
        for pair in pairs:
            self.fiber_inhibited[pair] = inhibited

    def fire(self, name, neurons, *, clamp=False):
        self.winners[name] = np.unique(np.asarray(neurons, dtype=np.int64))
        self.clamped[name] = clamp

    def activate_assembly(self, name, index):
        k = self.k[name]
        self.fire(name, np.arange(index * k, (index + 1) * k), clamp=True)

    def _sources(self, name, allowed):
        out = []
        for src in self.order:
            if (src, name) not in self.weights:
                continue
            if self.fiber_inhibited.get((src, name), False):
                continue
            if self.inhibited[src] or self.winners[src].size == 0:
                continue
            if allowed is not None and src not in allowed:
                continue
            out.append(src)
        return out

    def step(
        self,
        *,
        plasticity: bool = True,
        only: Mapping[str, Iterable[str]] | None = None,
        skip_undriven: bool = False,
    ) -> dict[str, np.ndarray]:
        names = list(only) if only is not None else [
            a for a in self.order if not self.inhibited[a]
        ]
        new, used = {}, {}
        for name in names:
            srcs = self._sources(name, None if only is None else set(only[name]))
            if self.clamped[name]:
                used[name] = srcs
                continue
            if not srcs and skip_undriven:
                continue
            total = np.zeros(self.n[name], dtype=np.float64)
            for src in srcs:
                w = self.weights[(src, name)]
                for i in self.winners[src]:
                    total += w[i]
            rng = None
            if self.tie_break == "random":
                key = [self.seed, _TIE_STREAM, self.order.index(name), self.step_counter]
                rng = np.random.Generator(np.random.PCG64(key))
            new[name] = dense_top_k(total, self.k[name], rng)
            used[name] = srcs
        if plasticity:
            for name, srcs in used.items():
                post = new.get(name, self.winners[name])
                factor = 1.0 + self.beta[name]
                for src in srcs:
                    w = self.weights[(src, name)]
                    for i in self.winners[src]:
                        row = w[i]
                        hit = post[row[post] > 0]
                        row[hit] *= factor
        for name, winners in new.items():
            self.winners[name] = winners
        self.step_counter += 1
        return new
