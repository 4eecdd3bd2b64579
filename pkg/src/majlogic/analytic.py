"""Closed-form bit error probabilities of the faulty one-step majority decoder.

All probabilities are doubles; long sums go through ``math.fsum``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .codes import TannerGraph, girth
from .errors import DomainError, InfeasibleError
from .fault import GOS, FailureModel, Table

MAX_SUBSET_L = 20
MAX_STATE_BITS = 24
# elements materialised by one Q-array evaluation of the majority sum
MAX_MAJORITY_ELEMENTS = 2 * 10**7
_CHUNK = 1 << 14


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 0.5:
        raise DomainError(f"crossover probability p must lie in [0, 0.5], got {p}")
    return p


def _check_degree(value: int, name: str, minimum: int) -> int:
    if int(value) != value or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value}")
    return int(value)


def _check_eps(eps, gamma: int) -> np.ndarray:
    eps = np.asarray(eps, dtype=float)
    if eps.shape[-1] != gamma:
        raise DomainError(f"error probability vector has length {eps.shape[-1]}, expected gamma={gamma}")
    if np.any(eps < 0) or np.any(eps > 1) or np.any(np.isnan(eps)):
        raise DomainError("error probabilities must lie in [0, 1]")
    return eps


@dataclass(frozen=True)
class AnalyticTerms:
    A: float
    B: float
    P: tuple[float, ...]


@dataclass(frozen=True)
class BerBounds:
    lower: float
    upper: float


@lru_cache(maxsize=None)
def _subset_rows(u: int, l: int) -> np.ndarray:
    rows = []
    full = range(1, l + 1)
    for head in itertools.combinations(full, u):
        chosen = set(head)
        rows.append(list(head) + [x for x in full if x not in chosen])
    out = np.array(rows, dtype=np.int64).reshape(len(rows), l)
    out.flags.writeable = False
    return out


def subset_array(u: int, l: int) -> np.ndarray:
    """Rows q = (sorted u-subset of 1..l, remaining elements ascending).

    Rows follow the lexicographic order of the u-subsets. Entries are
    1-based, matching the combinatorial convention.
    """
    u = _check_degree(u, "u", 0)
    l = _check_degree(l, "l", 0)
    if u > l or l > MAX_SUBSET_L:
        raise DomainError(f"need 0 <= u <= l <= {MAX_SUBSET_L}, got u={u}, l={l}")
    return _subset_rows(u, l).copy()


def xor_error_prob_A(p: float, rho: int) -> float:
    """Probability that a reliable XOR of rho-1 BSC outputs is wrong."""
    p = _check_p(p)
    rho = _check_degree(rho, "rho", 2)
    return 0.5 * (1.0 - (1.0 - 2.0 * p) ** (rho - 1))


def switch_parity_prob_B(p: float, rho: int) -> float:
    """Probability that channel noise flips the parity relation between two
    consecutive input vectors of a (rho-1)-input gate."""
    p = _check_p(p)
    rho = _check_degree(rho, "rho", 2)
    return 0.5 * (1.0 - (1.0 - 2.0 * p) ** (2 * (rho - 1)))


def analytic_terms(p: float, eps: Sequence[float], rho: int) -> AnalyticTerms:
    A = xor_error_prob_A(p, rho)
    B = switch_parity_prob_B(p, rho)
    eps = _check_eps(eps, len(eps))
    P = eps * (1.0 - A) + (1.0 - eps) * A
    return AnalyticTerms(A, B, tuple(float(x) for x in P))


@lru_cache(maxsize=None)
def _config_masks(gamma: int) -> tuple[np.ndarray, np.ndarray | None]:
    """Majority and tie selectors over all 2^gamma wrong/right configurations."""
    k = np.arange(1 << gamma, dtype=np.int64)
    wrong = np.zeros(k.shape, dtype=np.int64)
    for j in range(gamma):
        wrong += (k >> j) & 1
    major = np.flatnonzero(2 * wrong > gamma)
    tie = np.flatnonzero(2 * wrong == gamma) if gamma % 2 == 0 else None
    return major, tie


def _majority_terms(P: np.ndarray, gamma: int, p: float) -> np.ndarray:
    """Per-configuration miscorrection terms for a batch of P vectors.

    Returns an array (batch, K) whose rows sum to the miscorrection
    probability: one product per set of wrong estimates with more than
    gamma/2 members, plus p-weighted ties when gamma is even.
    """
    T = np.ones((P.shape[0], 1))
    for j in range(gamma):
        T = np.stack([T * (1.0 - P[:, j : j + 1]), T * P[:, j : j + 1]], axis=-1).reshape(P.shape[0], -1)
    major, tie = _config_masks(gamma)
    terms = T[:, major]
    if tie is not None:
        terms = np.concatenate([terms, p * T[:, tie]], axis=-1)
    return terms


def _majority_budget(gamma: int) -> int:
    """Rows of P that fit in one evaluation chunk."""
    if gamma > MAX_SUBSET_L:
        raise InfeasibleError(f"gamma={gamma} exceeds the configuration limit {MAX_SUBSET_L}")
    return max(1, MAX_MAJORITY_ELEMENTS // (1 << gamma))


def misdecode_batch(p: float, eps: np.ndarray, gamma: int, rho: int) -> np.ndarray:
    """Vectorised ``misdecode_prob`` over the leading axis of ``eps``."""
    p = _check_p(p)
    gamma = _check_degree(gamma, "gamma", 1)
    A = xor_error_prob_A(p, rho)
    eps = _check_eps(np.atleast_2d(eps), gamma)
    chunk = _majority_budget(gamma)
    out = np.empty(eps.shape[0])
    for start in range(0, eps.shape[0], chunk):
        P = eps[start : start + chunk] * (1.0 - A) + (1.0 - eps[start : start + chunk]) * A
        out[start : start + chunk] = _majority_terms(P, gamma, p).sum(axis=-1)
    return out


def misdecode_prob(p: float, eps: Sequence[float], gamma: int, rho: int) -> float:
    """Probability that one bit is miscorrected when its gamma XOR gates fail
    with the given probabilities.

    Strict majority decides; a tie (even gamma only) falls back to the
    channel bit, which is wrong with probability p.
    """
    p = _check_p(p)
    gamma = _check_degree(gamma, "gamma", 1)
    A = xor_error_prob_A(p, rho)
    eps = _check_eps(np.asarray(eps, dtype=float).reshape(1, -1), gamma)
    return _misdecode_rows(eps * (1.0 - A) + (1.0 - eps) * A, gamma, p)[0]


def _misdecode_rows(P: np.ndarray, gamma: int, p: float) -> list[float]:
    """Compensated per-row sums of the miscorrection terms."""
    chunk = _majority_budget(gamma)
    out = []
    for start in range(0, P.shape[0], chunk):
        out.extend(math.fsum(row.tolist()) for row in _majority_terms(P[start : start + chunk], gamma, p))
    return out


def misdecode_prob_vn(p: float, eps_bar: float, gamma: int, rho: int) -> float:
    """Miscorrection probability when every gate fails independently with eps_bar."""
    p = _check_p(p)
    gamma = _check_degree(gamma, "gamma", 1)
    eps_bar = float(_check_eps([eps_bar], 1)[0])
    A = xor_error_prob_A(p, rho)
    P = (1.0 - A) * eps_bar + A * (1.0 - eps_bar)
    terms = [math.comb(gamma, i) * P**i * (1.0 - P) ** (gamma - i) for i in range(gamma // 2 + 1, gamma + 1)]
    if gamma % 2 == 0:
        h = gamma // 2
        terms.append(p * math.comb(gamma, h) * P**h * (1.0 - P) ** h)
    return math.fsum(terms)


def fault_free_ber(p: float, gamma: int, rho: int) -> float:
    """BER with perfect gates; also the small-eps approximation of the GOS lower bound."""
    return misdecode_prob(p, [0.0] * _check_degree(gamma, "gamma", 1), gamma, rho)


def _eps_tilde(t: int, eps_bar: float, gamma: int) -> list[float]:
    return [eps_bar] * t + [0.0] * (gamma - t)


def _pv_profile(p: float, eps_bar: float, gamma: int, rho: int) -> list[float]:
    eps = np.array([_eps_tilde(t, eps_bar, gamma) for t in range(gamma + 1)])
    A = xor_error_prob_A(p, rho)
    _check_eps(eps, gamma)
    return _misdecode_rows(eps * (1.0 - A) + (1.0 - eps) * A, gamma, p)


def gos_bit_prob(t_v: int, p: float, eps_bar: float, gamma: int, rho: int) -> float:
    """Miscorrection probability of a bit with ``t_v`` non-switching gates
    under the gate-output switching model."""
    p = _check_p(p)
    gamma = _check_degree(gamma, "gamma", 1)
    t_v = _check_degree(t_v, "t_v", 0)
    if t_v > gamma:
        raise DomainError(f"t_v={t_v} exceeds gamma={gamma}")
    B = switch_parity_prob_B(p, rho)
    pv = _pv_profile(p, eps_bar, gamma, rho)
    terms = []
    for t in range(gamma + 1):
        for j in range(max(t + t_v - gamma, 0), min(t_v, t) + 1):
            w = (
                math.comb(t_v, j)
                * math.comb(gamma - t_v, t - j)
                * B ** (gamma + 2 * j - t_v - t)
                * (1.0 - B) ** (t_v + t - 2 * j)
            )
            terms.append(pv[t] * w)
    return math.fsum(terms)


def gos_ber_bounds(p: float, eps_bar: float, gamma: int, rho: int) -> BerBounds:
    """Best-case (all gates non-switching) and worst-case (all switching)
    BER under the gate-output switching model."""
    p = _check_p(p)
    gamma = _check_degree(gamma, "gamma", 1)
    B = switch_parity_prob_B(p, rho)
    pv = _pv_profile(p, eps_bar, gamma, rho)
    lower = math.fsum(math.comb(gamma, t) * B**t * (1 - B) ** (gamma - t) * pv[t] for t in range(gamma + 1))
    upper = math.fsum(math.comb(gamma, t) * B ** (gamma - t) * (1 - B) ** t * pv[t] for t in range(gamma + 1))
    return BerBounds(lower, upper)


def dependence_factor(p: float, eps_bar: float, gamma: int, rho: int) -> float:
    """Ratio lower/upper of the GOS bounds; 1 when both vanish."""
    b = gos_ber_bounds(p, eps_bar, gamma, rho)
    if b.upper == 0.0:
        return 1.0
    return b.lower / b.upper


# ---------------------------------------------------------------------------
# exact conditional BER over gate-state arrays


def gate_state_distribution(
    graph: TannerGraph, window: np.ndarray, v: int, p: float
) -> tuple[np.ndarray, np.ndarray]:
    """All gate states and their probabilities for the gates feeding ``v``.

    Returns ``states`` with shape (S, M, w), S = 2^(M w), and ``probs`` with
    shape (gamma, S): the chance that channel noise turns the transmitted
    input window of gate m into state s.
    """
    window = np.asarray(window, dtype=np.uint8)
    M = window.shape[0]
    w = graph.rho - 1
    L = M * w
    S = 1 << L
    states = ((np.arange(S)[:, None] >> np.arange(L - 1, -1, -1)) & 1).astype(np.uint8).reshape(S, M, w)
    probs = np.empty((graph.gamma, S))
    for m, e in enumerate(graph.var_edges[v]):
        sent = window[:, graph.gate_inputs[e]]  # (M, w)
        d = (states != sent).reshape(S, L).sum(axis=1)
        probs[m] = p**d * (1.0 - p) ** (L - d)
    return states, probs


def conditional_ber_general(
    graph: TannerGraph, codeword_window: Sequence, model: FailureModel, p: float
) -> float:
    """Exact average BER of the one-step decoder given the last M transmitted
    codewords (oldest first), summing over every gate-state array.

    Refuses when a variable's state arrays number more than 2^24.
    """
    p = _check_p(p)
    window = np.asarray(codeword_window, dtype=np.uint8)
    if window.ndim != 2 or window.shape[1] != graph.n:
        raise DomainError(f"codeword window must have shape (M, {graph.n})")
    M = window.shape[0]
    if isinstance(model, GOS) and M != 2:
        raise DomainError(f"the GOS model needs a window of M=2 codewords, got {M}")
    if isinstance(model, Table) and (model.memory != M or model.width != graph.rho - 1):
        raise DomainError(
            f"table model (M={model.memory}, width={model.width}) does not match window M={M}, rho-1={graph.rho - 1}"
        )
    bits = (graph.rho - 1) * graph.gamma * M
    if bits > MAX_STATE_BITS:
        raise InfeasibleError(f"(rho-1)*gamma*M = {bits} exceeds {MAX_STATE_BITS}; too many state arrays")
    for k, word in enumerate(window):
        if not graph.is_codeword(word):
            raise DomainError(f"window entry {k} is not a codeword")
    g = girth(graph)
    if g < 6:
        raise DomainError(f"girth {g} < 6: gate inputs of a variable are not distinct")

    gamma = graph.gamma
    per_var = []
    for v in range(graph.n):
        states, probs = gate_state_distribution(graph, window, v, p)
        eps_of_state = np.asarray(model.probs(states), dtype=float)
        S = states.shape[0]
        rest = gamma - 1
        # indices of gates 2..gamma enumerated jointly; gate 1 in the outer loop
        tail = np.indices((S,) * rest).reshape(rest, -1).T if rest else np.zeros((1, 0), dtype=np.intp)
        tail_weight = np.ones(tail.shape[0])
        for m in range(rest):
            tail_weight *= probs[m + 1, tail[:, m]]
        acc = []
        for s0 in range(S):
            if probs[0, s0] == 0.0:
                continue
            for start in range(0, tail.shape[0], _CHUNK):
                idx = tail[start : start + _CHUNK]
                eps = np.empty((idx.shape[0], gamma))
                eps[:, 0] = eps_of_state[s0]
                eps[:, 1:] = eps_of_state[idx]
                pv = misdecode_batch(p, eps, gamma, graph.rho)
                acc.append(float(probs[0, s0] * np.dot(tail_weight[start : start + _CHUNK], pv)))
        per_var.append(math.fsum(acc))
    return math.fsum(per_var) / graph.n


def sweep(gamma: int, rho: int, eps_bar: float, p_values: Sequence[float], model: str) -> list[dict]:
    """Rows of (p, ber_lower, ber_upper, F) for the CLI curves."""
    rows = []
    for p in p_values:
        if model == "gos-bounds":
            b = gos_ber_bounds(p, eps_bar, gamma, rho)
            lo, up = b.lower, b.upper
        elif model == "vn":
            lo = up = misdecode_prob_vn(p, eps_bar, gamma, rho)
        elif model == "fault-free":
            lo = up = fault_free_ber(p, gamma, rho)
        else:
            raise DomainError(f"unknown sweep model {model!r}")
        F = 1.0 if up == 0.0 else lo / up
        rows.append({"p": float(p), "ber_lower": lo, "ber_upper": up, "F": F})
    return rows
