"""Monte Carlo simulation of faulty majority-logic decoders over a BSC.

Every XOR gate is a (check, excluded variable) pair with its own input
history. Random numbers are drawn from counter-based streams indexed by trial,
so results do not depend on batch size or on the number of workers.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .codes import TannerGraph, combine, encoder_from_parity
from .errors import DomainError
from .fault import GOS, FailureModel, Table
from .rng import stream

BLOCK_ELEMENTS = 1 << 22


# -- configuration -----------------------------------------------------------


@dataclass(frozen=True)
class ChannelParams:
    p: float

    def __post_init__(self):
        if not 0.0 <= float(self.p) <= 0.5:
            raise DomainError(f"crossover probability p must lie in [0, 0.5], got {self.p}")


@dataclass(frozen=True)
class AllZero:
    pass


@dataclass(frozen=True)
class Repeat:
    codeword: tuple[int, ...]


@dataclass(frozen=True)
class AlternateComplement:
    """Alternates ``base`` (all-zero by default) and its complement."""

    base: tuple[int, ...] | None = None


@dataclass(frozen=True)
class RandomCodewords:
    seed: int


CodewordPolicy = Union[AllZero, Repeat, AlternateComplement, RandomCodewords]


@dataclass(frozen=True)
class OSMAJ:
    first_iter_reliable: bool = False


@dataclass(frozen=True)
class BitFlip:
    max_iters: int
    first_iter_reliable: bool = False

    def __post_init__(self):
        if self.max_iters < 1:
            raise DomainError("max_iters must be >= 1")


Decoder = Union[OSMAJ, BitFlip]


@dataclass(frozen=True)
class ExperimentConfig:
    graph: TannerGraph
    model: FailureModel
    channel: ChannelParams
    codeword_policy: CodewordPolicy
    decoder: Decoder
    trials: int
    seed: int = 0
    min_errors: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if self.min_errors is not None and self.min_errors < 0:
            raise DomainError("min_errors must be >= 0")
        g = self.graph
        pol = self.codeword_policy
        if isinstance(pol, Repeat) and not g.is_codeword(np.asarray(pol.codeword, dtype=np.uint8)):
            raise DomainError("Repeat policy word is not a codeword")
        if isinstance(pol, AlternateComplement):
            if not g.is_codeword(np.ones(g.n, dtype=np.uint8)):
                raise DomainError("AlternateComplement needs the all-ones word to be a codeword (rho even)")
            if pol.base is not None and not g.is_codeword(np.asarray(pol.base, dtype=np.uint8)):
                raise DomainError("AlternateComplement base word is not a codeword")
        _memory(self.model, g)


@dataclass
class SimStats:
    trials_run: int
    bit_errors: int
    frame_errors: int
    n: int
    elapsed: float = field(default=0.0, compare=False)

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.n * self.trials_run) if self.trials_run else 0.0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.trials_run if self.trials_run else 0.0

    @property
    def ci95_ber(self) -> float:
        if not self.trials_run:
            return 0.0
        b = self.ber
        return 1.96 * math.sqrt(b * (1.0 - b) / (self.n * self.trials_run))


# -- decoding core -----------------------------------------------------------


def _memory(model: FailureModel, graph: TannerGraph) -> int:
    if isinstance(model, GOS):
        return 2
    if isinstance(model, Table):
        if model.width != graph.rho - 1:
            raise DomainError(f"table width {model.width} does not match gate fan-in rho-1={graph.rho - 1}")
        return model.memory
    return 1


def _majority(graph: TannerGraph, est: np.ndarray, received: np.ndarray) -> np.ndarray:
    ones = est[:, graph.var_edges].sum(axis=-1, dtype=np.int64)
    twice, g = 2 * ones, graph.gamma
    return np.where(twice > g, 1, np.where(twice < g, 0, received)).astype(np.uint8)


def _zero_syndrome(graph: TannerGraph, x: np.ndarray) -> np.ndarray:
    return ~(x[:, graph.chk_array].sum(axis=-1) & 1).astype(bool).any(axis=-1)


def _decode(
    graph: TannerGraph,
    received: np.ndarray,
    model: FailureModel,
    prior: list[np.ndarray],
    max_iters: int,
    first_iter_reliable: bool,
    uniforms: Callable[[int], np.ndarray],
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batched parallel decoding.

    ``received`` is (B, n). ``prior`` lists earlier gate input arrays (B, E, w),
    oldest first; it may be shorter than M-1, in which case the oldest
    available input vector is repeated. ``uniforms(i)`` returns (B, E) draws
    for iteration ``i``. Returns (decoded, iterations_used, converged).
    """
    M = _memory(model, graph)
    B = received.shape[0]
    x = received.copy()
    history = list(prior)
    iters = np.zeros(B, dtype=np.int64)
    converged = np.zeros(B, dtype=bool)
    active = np.arange(B)
    for it in range(1, max_iters + 1):
        xa = x[active]
        inputs = xa[:, graph.gate_inputs]
        est = (inputs.sum(axis=-1) & 1).astype(np.uint8)
        if not (model.is_reliable or (first_iter_reliable and it == 1)):
            rows = [h[active] for h in history[-(M - 1):]] if M > 1 else []
            rows = [rows[0] if rows else inputs] * (M - 1 - len(rows)) + rows + [inputs]
            prob = model.probs(np.stack(rows, axis=2))
            est ^= (uniforms(it)[active] < prob).astype(np.uint8)
        x[active] = _majority(graph, est, received[active])
        iters[active] = it
        if M > 1:
            full = np.zeros((B,) + inputs.shape[1:], dtype=np.uint8)
            full[active] = inputs
            history.append(full)
            del history[: max(len(history) - (M - 1), 0)]
        done = _zero_syndrome(graph, x[active])
        converged[active] = done
        active = active[~done]
        if active.size == 0:
            break
    return x, iters, converged


def _prior_from_words(graph: TannerGraph, prev_inputs, M: int) -> list[np.ndarray]:
    if prev_inputs is None:
        return []
    arr = np.asarray(prev_inputs, dtype=np.uint8)
    w = graph.rho - 1
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[1:] != (graph.num_edges, w):
        raise DomainError(f"prev_inputs must have shape (E, rho-1) or (H, E, rho-1) with E={graph.num_edges}, rho-1={w}")
    if M == 1:
        return []
    return [row[None] for row in arr[-(M - 1):]]


def _check_word(graph: TannerGraph, word, name: str) -> np.ndarray:
    arr = np.asarray(word, dtype=np.uint8)
    if arr.shape != (graph.n,):
        raise DomainError(f"{name} has shape {arr.shape}, expected ({graph.n},)")
    return arr


def osmaj_decode(graph: TannerGraph, received, model: FailureModel, prev_inputs=None, rng=None) -> np.ndarray:
    """One majority-logic round with faulty XOR gates.

    ``prev_inputs`` holds each gate's earlier input vectors, shape (E, rho-1)
    or (H, E, rho-1) oldest first. Absent means no prior transition.
    """
    r = _check_word(graph, received, "received")
    rng = np.random.default_rng() if rng is None else rng
    prior = _prior_from_words(graph, prev_inputs, _memory(model, graph))
    u = rng.random((1, graph.num_edges))
    decoded, _, _ = _decode(graph, r[None], model, prior, 1, False, lambda it: u)
    return decoded[0]


def bitflip_decode(
    graph: TannerGraph,
    received,
    model: FailureModel,
    max_iters: int,
    first_iter_reliable: bool = False,
    rng=None,
    prev_inputs=None,
) -> tuple[np.ndarray, int, bool]:
    if max_iters < 1:
        raise DomainError("max_iters must be >= 1")
    r = _check_word(graph, received, "received")
    rng = np.random.default_rng() if rng is None else rng
    M = _memory(model, graph)
    prior = [] if first_iter_reliable else _prior_from_words(graph, prev_inputs, M)
    E = graph.num_edges
    decoded, iters, conv = _decode(
        graph, r[None], model, prior, max_iters, first_iter_reliable, lambda it: rng.random((1, E))
    )
    return decoded[0], int(iters[0]), bool(conv[0])


# -- experiments -------------------------------------------------------------


class _Source:
    """Transmitted codeword and received word for any trial index."""

    def __init__(self, config: ExperimentConfig):
        g = config.graph
        self.n = g.n
        self.p = float(config.channel.p)
        self.seed = config.seed
        self.policy = config.codeword_policy
        if isinstance(self.policy, RandomCodewords):
            self.basis = encoder_from_parity(g)

    def codewords(self, idx: np.ndarray) -> np.ndarray:
        pol, n = self.policy, self.n
        if isinstance(pol, AllZero):
            return np.zeros((idx.size, n), dtype=np.uint8)
        if isinstance(pol, Repeat):
            return np.tile(np.asarray(pol.codeword, dtype=np.uint8), (idx.size, 1))
        if isinstance(pol, AlternateComplement):
            base = np.zeros(n, dtype=np.uint8) if pol.base is None else np.asarray(pol.base, dtype=np.uint8)
            return base[None] ^ (idx % 2).astype(np.uint8)[:, None]
        k = self.basis.shape[0]
        if k == 0:
            return np.zeros((idx.size, n), dtype=np.uint8)
        coeffs = stream(pol.seed, "codeword").rows(int(idx[0]), idx.size, k) < 0.5
        return combine(self.basis, coeffs)

    def received(self, start: int, count: int) -> tuple[np.ndarray, np.ndarray]:
        idx = np.arange(start, start + count)
        cw = self.codewords(idx)
        noise = stream(self.seed, "channel").rows(start, count, self.n) < self.p
        return cw, cw ^ noise.astype(np.uint8)


def block_size(graph: TannerGraph, model: FailureModel) -> int:
    per_trial = graph.num_edges * (graph.rho - 1) * (_memory(model, graph) + 1)
    return max(1, BLOCK_ELEMENTS // per_trial)


def _run_block(config: ExperimentConfig, source: _Source, start: int, count: int) -> tuple[int, int]:
    g, model = config.graph, config.model
    M = _memory(model, g)
    dec = config.decoder
    first_rel = dec.first_iter_reliable
    max_iters = dec.max_iters if isinstance(dec, BitFlip) else 1
    lo = max(start - (M - 1), 0)
    cw_all, rx_all = source.received(lo, start + count - lo)
    off = start - lo
    cw, rx = cw_all[off:], rx_all[off:]
    prior = []
    if M > 1 and not first_rel:
        trial = np.arange(start, start + count)
        for back in range(M - 1, 0, -1):
            # trial 0 has no predecessor: its own received word stands in
            prior.append(rx_all[np.maximum(trial - back, 0) - lo][:, g.gate_inputs])
    E = g.num_edges
    decoded, _, _ = _decode(
        g,
        rx,
        model,
        prior,
        max_iters,
        first_rel,
        lambda it: stream(config.seed, "gate", it).rows(start, count, E),
    )
    wrong = (decoded != cw).sum(axis=1)
    return int(wrong.sum()), int((wrong > 0).sum())


def default_threads() -> int:
    env = os.environ.get("MAJLOGIC_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_ber_experiment(config: ExperimentConfig, threads: int | None = None) -> SimStats:
    """Simulate ``config.trials`` codeword transmissions and decodings.

    Trials are processed in fixed-size blocks; early stopping on
    ``min_errors`` frame errors happens at block boundaries, so the result
    is the same for every worker count.
    """
    t0 = time.perf_counter()
    threads = default_threads() if threads is None else max(1, int(threads))
    source = _Source(config)
    size = block_size(config.graph, config.model)
    blocks = [(s, min(size, config.trials - s)) for s in range(0, config.trials, size)]
    target = config.min_errors or None
    stats = SimStats(0, 0, 0, config.graph.n)

    def absorb(results) -> bool:
        for (s, c), (bits, frames) in results:
            stats.trials_run += c
            stats.bit_errors += bits
            stats.frame_errors += frames
            if target is not None and stats.frame_errors >= target:
                return True
        return False

    if threads == 1:
        for s, c in blocks:
            if absorb([((s, c), _run_block(config, source, s, c))]):
                break
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for w in range(0, len(blocks), threads):
                wave = blocks[w : w + threads]
                results = list(pool.map(lambda b: _run_block(config, source, *b), wave))
                if absorb(zip(wave, results)):
                    break
    stats.elapsed = time.perf_counter() - t0
    return stats


# -- isolated variable -------------------------------------------------------


def simulate_single_variable(
    t_v: int,
    p: float,
    eps_bar: float,
    gamma: int,
    rho: int,
    trials: int,
    seed: int = 0,
    coupled: bool = True,
    chunk: int = 1 << 18,
) -> SimStats:
    """OS-MAJ on one variable fed by ``gamma`` independent GOS gates.

    The first ``t_v`` gates see an even number of input changes between the
    previous and current codeword, the rest an odd number. The current
    codeword is all-zero. With ``coupled`` the switching test uses the same
    channel noise as the gate output; otherwise the switching test draws its
    own independent noise.
    """
    ChannelParams(p)
    if not 0 <= t_v <= gamma:
        raise DomainError(f"t_v must lie in 0..{gamma}")
    w = rho - 1
    d = np.array([0] * t_v + [1] * (gamma - t_v), dtype=np.uint8)
    rng = np.random.default_rng(seed)
    errors = 0
    done = 0
    while done < trials:
        b = min(chunk, trials - done)
        cur = (rng.random((b, gamma, w)) < p).sum(axis=-1) & 1
        prev = (rng.random((b, gamma, w)) < p).sum(axis=-1) & 1
        now = cur if coupled else (rng.random((b, gamma, w)) < p).sum(axis=-1) & 1
        switched = (prev ^ now ^ d).astype(bool)
        fail = switched & (rng.random((b, gamma)) < eps_bar)
        wrong = (cur.astype(bool) ^ fail).sum(axis=1)
        r_bad = rng.random(b) < p
        bad = np.where(2 * wrong > gamma, True, np.where(2 * wrong < gamma, False, r_bad))
        errors += int(bad.sum())
        done += b
    return SimStats(trials, errors, errors, 1)
