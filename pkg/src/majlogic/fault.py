"""Gate states and XOR failure laws.

A gate's state is the window of its last ``M`` input vectors (oldest row
first, current inputs last). A failure law maps a state to the probability
that the gate output is inverted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .codes import TannerGraph
from .errors import DomainError

MAX_TABLE_BITS = 24


def _check_prob(x: float, name: str) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {x}")
    return x


@dataclass(frozen=True)
class GateState:
    window: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.window) < 1:
            raise DomainError("a gate state needs at least one input vector")
        widths = {len(row) for row in self.window}
        if len(widths) != 1:
            raise DomainError("all rows of a gate state must have the same width")
        if any(b not in (0, 1) for row in self.window for b in row):
            raise DomainError("gate inputs must be bits")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> GateState:
        return cls(tuple(tuple(int(b) for b in row) for row in rows))

    @property
    def memory(self) -> int:
        return len(self.window)

    @property
    def width(self) -> int:
        return len(self.window[0])

    def bitstring(self) -> str:
        return "".join(str(b) for row in self.window for b in row)

    def index(self) -> int:
        return int(self.bitstring(), 2)


@dataclass(frozen=True)
class StateArray:
    """The gamma gate states feeding one variable's majority gate."""

    states: tuple[GateState, ...]

    def __post_init__(self):
        shapes = {(s.memory, s.width) for s in self.states}
        if len(shapes) > 1:
            raise DomainError("all states in a state array must share memory order and width")


class FailureModel:
    """Base class; subclasses give the failure probability of a gate state.

    ``probs`` is the batched form: ``windows`` has shape (..., M, w) and the
    result has shape (...).
    """

    def failure_prob(self, state: GateState) -> float:
        self._check_state(state)
        return float(self.probs(np.array(state.window, dtype=np.uint8)))

    def _check_state(self, state: GateState) -> None:
        memory = getattr(self, "memory", None)
        if memory is not None and state.memory != memory:
            raise DomainError(f"{type(self).__name__} needs M={memory}, state has M={state.memory}")

    def probs(self, windows: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def is_reliable(self) -> bool:
        return False


@dataclass(frozen=True)
class Reliable(FailureModel):
    def probs(self, windows):
        return np.zeros(np.shape(windows)[:-2])

    @property
    def is_reliable(self) -> bool:
        return True


@dataclass(frozen=True)
class VonNeumann(FailureModel):
    eps_bar: float

    def __post_init__(self):
        _check_prob(self.eps_bar, "eps_bar")

    def probs(self, windows):
        return np.full(np.shape(windows)[:-2], float(self.eps_bar))

    @property
    def is_reliable(self) -> bool:
        return self.eps_bar == 0


@dataclass(frozen=True)
class GOS(FailureModel):
    """Gate-output switching: fails with ``eps_bar`` only when the ideal XOR
    output differs from the one at the previous time step."""

    eps_bar: float
    memory = 2

    def __post_init__(self):
        _check_prob(self.eps_bar, "eps_bar")

    def probs(self, windows):
        windows = np.asarray(windows)
        if windows.shape[-2] != 2:
            raise DomainError(f"GOS needs M=2, got M={windows.shape[-2]}")
        parity = windows.sum(axis=-1, dtype=np.int64) & 1
        switched = parity[..., 0] != parity[..., 1]
        return np.where(switched, float(self.eps_bar), 0.0)

    def probs_from_switch(self, switched: np.ndarray) -> np.ndarray:
        return np.where(switched, float(self.eps_bar), 0.0)

    @property
    def is_reliable(self) -> bool:
        return self.eps_bar == 0


@dataclass(frozen=True)
class Table(FailureModel):
    """Arbitrary state -> probability law over windows of ``memory`` rows.

    Keys are row-major bitstrings, oldest row first. Missing states take
    ``default``; without a default the table must be complete.
    """

    memory: int
    table: Mapping[str, float] = field(hash=False)
    default: float | None = None
    _dense: np.ndarray = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.memory < 1:
            raise DomainError("memory order M must be >= 1")
        lengths = {len(k) for k in self.table}
        if len(lengths) > 1:
            raise DomainError("table keys have differing lengths")
        if not lengths:
            raise DomainError("table is empty; cannot infer the input width")
        bits = lengths.pop()
        if bits % self.memory:
            raise DomainError(f"key length {bits} is not a multiple of M={self.memory}")
        if bits > MAX_TABLE_BITS:
            raise DomainError(f"state space 2^{bits} exceeds 2^{MAX_TABLE_BITS}")
        if self.default is None and len(self.table) != 1 << bits:
            raise DomainError(
                f"table covers {len(self.table)} of {1 << bits} states and declares no default"
            )
        fill = 0.0 if self.default is None else _check_prob(self.default, "default")
        dense = np.full(1 << bits, fill)
        for key, prob in self.table.items():
            if set(key) - {"0", "1"}:
                raise DomainError(f"table key {key!r} is not a bitstring")
            dense[int(key, 2)] = _check_prob(prob, f"table[{key}]")
        object.__setattr__(self, "_dense", dense)
        object.__setattr__(self, "width", bits // self.memory)

    def probs(self, windows):
        windows = np.asarray(windows)
        if windows.shape[-2:] != (self.memory, self.width):
            raise DomainError(
                f"state shape {windows.shape[-2:]} does not match table (M={self.memory}, width={self.width})"
            )
        flat = windows.reshape(windows.shape[:-2] + (-1,)).astype(np.int64)
        weights = 1 << np.arange(flat.shape[-1] - 1, -1, -1, dtype=np.int64)
        return self._dense[flat @ weights]

    @classmethod
    def from_json(cls, text: str, memory: int) -> Table:
        data = json.loads(text)
        default = data.pop("default", None)
        return cls(memory, {str(k): float(v) for k, v in data.items()}, default)

    def to_json(self) -> str:
        data = dict(sorted(self.table.items()))
        if self.default is not None:
            data["default"] = self.default
        return json.dumps(data, indent=2)


def failure_prob(model: FailureModel, state: GateState) -> float:
    return model.failure_prob(state)


def sample_gate_output(
    model: FailureModel,
    inputs_now: Sequence[int],
    inputs_prev_window: Sequence[Sequence[int]],
    rng: np.random.Generator,
) -> int:
    """Faulty XOR of ``inputs_now``.

    ``inputs_prev_window`` holds the M-1 earlier input vectors, oldest first.
    One uniform is drawn from ``rng`` per call regardless of the model.
    """
    now = [int(b) for b in inputs_now]
    rows = [list(map(int, r)) for r in inputs_prev_window] + [now]
    if any(len(r) != len(now) for r in rows):
        raise DomainError("input vectors in the window have different widths")
    state = GateState.from_rows(rows)
    prob = failure_prob(model, state)
    ideal = sum(now) & 1
    return ideal ^ int(rng.random() < prob)


def switch_profile(prev_codeword, cur_codeword, graph: TannerGraph, v: int) -> int:
    """Number of gates feeding ``v`` whose inputs change in an even number of
    positions between the two codewords (non-switching gates)."""
    if not 0 <= v < graph.n:
        raise DomainError(f"variable index {v} outside 0..{graph.n - 1}")
    prev = np.asarray(prev_codeword, dtype=np.uint8)
    cur = np.asarray(cur_codeword, dtype=np.uint8)
    for name, word in (("prev_codeword", prev), ("cur_codeword", cur)):
        if not graph.is_codeword(word):
            raise DomainError(f"{name} is not a codeword of the graph")
    diff = prev ^ cur
    count = 0
    for c in graph.var_adj[v]:
        others = [u for u in graph.chk_adj[c] if u != v]
        if int(diff[others].sum()) % 2 == 0:
            count += 1
    return count


def parse_model(spec: str, table_memory: int = 2) -> FailureModel:
    """Parse ``reliable``, ``vn:EPS``, ``gos:EPS`` or ``table:PATH``."""
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "reliable" and not arg:
        return Reliable()
    if kind in ("vn", "gos"):
        try:
            eps = float(arg)
        except ValueError:
            raise DomainError(f"model {spec!r}: expected a probability after ':'") from None
        return VonNeumann(eps) if kind == "vn" else GOS(eps)
    if kind == "table" and arg:
        with open(arg, encoding="utf-8") as fh:
            return Table.from_json(fh.read(), table_memory)
    raise DomainError(f"unknown failure model {spec!r} (expected reliable, vn:EPS, gos:EPS, table:PATH)")
