"""Exhaustive worst-case check of parallel bit-flipping under switching faults.

The all-zero codeword is sent (the decoder and fault law are symmetric under
codeword translation). The first iteration runs on reliable gates. From the
second iteration on, any gate whose ideal output differs from its previous
ideal output may fail, and the adversary picks which ones do.

Gates feed exactly one variable each, so the adversary's choices decompose
per variable: every variable's next value is either forced or free. The
search branches over the free variables, memoized on the decoder state.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .codes import TannerGraph
from .errors import DomainError

MAX_ITERS = 5


@dataclass(frozen=True)
class Verdict:
    status: str  # "proven" | "counterexample" | "budget_exceeded"
    weight: int
    explored: int
    pattern: tuple[int, ...] | None = None
    failures: tuple[tuple[int, ...], ...] | None = None  # failing gate (edge) ids per iteration
    trajectory: tuple[tuple[int, ...], ...] | None = field(default=None, repr=False)

    @property
    def proven(self) -> bool:
        return self.status == "proven"

    def to_dict(self) -> dict:
        out = {"status": self.status, "weight": self.weight, "explored": self.explored}
        if self.pattern is not None:
            out["pattern"] = list(self.pattern)
            out["failures"] = [list(f) for f in self.failures]
            out["trajectory"] = [list(t) for t in self.trajectory]
        return out


class _Budget(Exception):
    pass


class _Search:
    def __init__(self, graph: TannerGraph, received: np.ndarray, adversary: bool, max_iters: int, cap: int):
        self.g = graph
        self.r = received
        self.adversary = adversary
        self.max_iters = max_iters
        self.cap = cap
        self.explored = 0
        self.memo: dict = {}

    def _ideal(self, x: np.ndarray) -> np.ndarray:
        return x[self.g.gate_inputs].sum(axis=-1) & 1

    def _options(self, prev: np.ndarray, cur: np.ndarray):
        """Per-variable reachable values plus, for each value, the gates to fail."""
        g = self.g
        est = self._ideal(cur)
        switched = est != self._ideal(prev) if self.adversary else np.zeros_like(est, dtype=bool)
        opts = []
        for v in range(g.n):
            edges = g.var_edges[v]
            ones = int(est[edges].sum())
            up = [int(e) for e in edges if switched[e] and est[e] == 0]
            down = [int(e) for e in edges if switched[e] and est[e] == 1]
            reach: dict[int, tuple[int, ...]] = {}
            # fewest failures first so the recorded witness is minimal
            for k in sorted(range(ones - len(down), ones + len(up) + 1), key=lambda k: abs(k - ones)):
                val = 1 if 2 * k > g.gamma else 0 if 2 * k < g.gamma else int(self.r[v])
                if val not in reach:
                    reach[val] = tuple(up[: k - ones]) if k >= ones else tuple(down[: ones - k])
            opts.append(sorted(reach.items()))
        return opts

    def run(self, prev: np.ndarray, cur: np.ndarray, it: int):
        """Decoder state after ``it`` iterations. Returns None if every branch
        succeeds, else a failing continuation [(state, failed gates), ...]."""
        if not cur.any():
            return None
        if not self.g.syndrome(cur).any() or it >= self.max_iters:
            return []
        key = (it, prev.tobytes(), cur.tobytes())
        if key in self.memo:
            return self.memo[key]
        self.explored += 1
        if self.explored > self.cap:
            raise _Budget
        opts = self._options(prev, cur)
        result = None
        for choice in itertools.product(*opts):
            nxt = np.array([val for val, _ in choice], dtype=np.uint8)
            failed = tuple(sorted(e for _, gates in choice for e in gates))
            sub = self.run(cur, nxt, it + 1)
            if sub is not None:
                result = [(nxt, failed)] + sub
                break
        self.memo[key] = result
        return result


def _first_iteration(graph: TannerGraph, r: np.ndarray) -> np.ndarray:
    est = r[graph.gate_inputs].sum(axis=-1) & 1
    ones = est[graph.var_edges].sum(axis=-1)
    return np.where(2 * ones > graph.gamma, 1, np.where(2 * ones < graph.gamma, 0, r)).astype(np.uint8)


def _check_pattern(graph, pattern, adversary, max_iters, cap):
    r = np.zeros(graph.n, dtype=np.uint8)
    r[list(pattern)] = 1
    search = _Search(graph, r, adversary, max_iters, cap)
    x1 = _first_iteration(graph, r)
    try:
        tail = search.run(r, x1, 1)
    except _Budget:
        return "budget", search.explored + 1, None
    if tail is None:
        return "ok", search.explored + 1, None
    path = [(x1, ())] + tail
    return "fail", search.explored + 1, path


def adversarial_guarantee_check(
    graph: TannerGraph,
    weight: int,
    budget: int = 10**6,
    max_iters: int = MAX_ITERS,
    adversary: bool = True,
    threads: int = 1,
) -> Verdict:
    """Decide whether every error pattern of ``weight`` is corrected within
    ``max_iters`` iterations against every admissible choice of gate failures.

    ``budget`` bounds the total number of decoder states expanded. With
    ``adversary=False`` all gates are reliable.
    """
    if weight < 0 or weight > graph.n:
        raise DomainError(f"weight must lie in 0..{graph.n}")
    if not 1 <= max_iters <= MAX_ITERS:
        raise DomainError(f"max_iters must lie in 1..{MAX_ITERS}")
    if budget < 1:
        raise DomainError("budget must be >= 1")
    if weight == 0:
        return Verdict("proven", 0, 0)
    if math.comb(graph.n, weight) > budget:
        return Verdict("budget_exceeded", weight, 0)
    patterns = list(itertools.combinations(range(graph.n), weight))

    def job(pat):
        return _check_pattern(graph, pat, adversary, max_iters, budget)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = pool.map(job, patterns)
    else:
        results = map(job, patterns)

    total = 0
    for pat, (status, explored, path) in zip(patterns, results):
        total += explored
        if status == "budget" or total > budget:
            return Verdict("budget_exceeded", weight, total)
        if status == "fail":
            return Verdict(
                "counterexample",
                weight,
                total,
                pattern=pat,
                failures=tuple(f for _, f in path),
                trajectory=tuple(tuple(int(b) for b in x) for x, _ in path),
            )
    return Verdict("proven", weight, total)
