"""Guaranteed error-correction bounds for the bit-flipping decoder with
switching-induced gate failures: expander capacity, corrupt-variable
trajectories, girth capacity via the Moore bound, and the expansion
trade-off between subset size and slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError

SQRT2 = math.sqrt(2.0)
GRID_POINTS = 10_000
GOLDEN_RTOL = 1e-10


def _check_slack(slack: float, *, closed: bool = True) -> float:
    slack = float(slack)
    ok = 0.0 < slack <= 0.125 if closed else 0.0 < slack < 0.125
    if not ok:
        interval = "(0, 1/8]" if closed else "(0, 1/8)"
        raise DomainError(f"slack must lie in {interval}, got {slack}")
    return slack


def _check_cxor(c_xor: float) -> float:
    if c_xor < 0:
        raise DomainError(f"c_xor must be >= 0, got {c_xor}")
    return float(c_xor)


@dataclass(frozen=True)
class ExpanderParams:
    alpha: float
    slack: float
    n: int

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        _check_slack(self.slack)
        if self.n < 1:
            raise DomainError("n must be >= 1")


@dataclass(frozen=True)
class GirthParams:
    gamma: int
    g: int

    def __post_init__(self):
        if self.gamma < 8:
            raise DomainError(f"the girth guarantee needs gamma >= 8, got {self.gamma}")
        if self.g % 2 or self.g < 6:
            raise DomainError(f"girth must be even and >= 6, got {self.g}")


@dataclass(frozen=True)
class GuaranteeQuery:
    params: Union[ExpanderParams, GirthParams]
    c_xor: float = 0.0

    def __post_init__(self):
        _check_cxor(self.c_xor)


@dataclass(frozen=True)
class TrajectoryQuery:
    v1: float
    beta: float
    slack: float
    c_xor: float
    i: int

    def __post_init__(self):
        if self.v1 < 0:
            raise DomainError("v1 must be >= 0")
        if self.beta <= 0:
            raise DomainError("beta must be > 0")
        K = 1.0 - 8.0 * _check_slack(self.slack)
        if 2.0 * self.beta < K - 1e-15:
            raise DomainError(f"need 2*beta >= 1-8*slack, got beta={self.beta}, slack={self.slack}")
        _check_cxor(self.c_xor)
        if self.i < 2:
            raise DomainError("the trajectory bound applies from iteration i=2 on")


# -- expander capacity -------------------------------------------------------


def theorem2_capacity(q: GuaranteeQuery) -> float:
    """Strict upper bound on the number of correctable channel errors."""
    if not isinstance(q.params, ExpanderParams):
        raise DomainError("expander capacity needs ExpanderParams")
    e = q.params
    return 3.0 * (3.0 + 8.0 * e.slack) * e.alpha * e.n / 32.0 - SQRT2 * q.c_xor


def lemma5_v2_bound(v1: float, slack: float, c_xor: float) -> float:
    """Corrupt variables after the first iteration."""
    if v1 < 0:
        raise DomainError("v1 must be >= 0")
    slack = _check_slack(slack)
    return (1.0 - 8.0 * slack) / 2.0 * v1 + _check_cxor(c_xor)


def contraction_ratio(slack: float) -> float:
    K = 1.0 - 8.0 * _check_slack(slack)
    sk = math.sqrt(K)
    return 2.0 * sk / (math.sqrt(9.0 - 8.0 * slack) - sk)


def lemma4_vi_bound(q: TrajectoryQuery) -> float:
    K = 1.0 - 8.0 * q.slack
    if K == 0.0:
        # limit slack -> 1/8: the recurrence forces |V_i| = 0 from i = 3 on
        return q.beta * q.v1 if q.i == 2 else 0.0
    s, sk = math.sqrt(9.0 - 8.0 * q.slack), math.sqrt(K)
    lead = (4.0 * sk + (2.0 * q.beta - K) * (s - sk)) / (K * s)
    return lead * contraction_ratio(q.slack) ** q.i * q.v1


def vi_trajectory_bound(v1: float, c_xor: float, slack: float, i: int) -> float:
    """Corrupt variables before iteration ``i`` in terms of |V_1| and |C_XOR|."""
    if v1 < 0:
        raise DomainError("v1 must be >= 0")
    c_xor = _check_cxor(c_xor)
    slack = _check_slack(slack)
    if i < 1:
        raise DomainError("iteration index i must be >= 1")
    K = 1.0 - 8.0 * slack
    if K == 0.0:
        v_part = v1 if i == 1 else 0.0
        if c_xor == 0.0:
            c_part = 0.0
        else:
            c_part = math.inf if i == 1 else c_xor if i == 2 else 0.0
        return v_part + c_part
    s, sk = math.sqrt(9.0 - 8.0 * slack), math.sqrt(K)
    lead = (4.0 * sk * v1 + 2.0 * (s - sk) * c_xor) / (K * s)
    return lead * contraction_ratio(slack) ** i


# -- girth capacity ----------------------------------------------------------


def moore_n0(d: float, g0: int) -> float:
    """Moore lower bound on the node count of a graph with average degree
    ``d`` and girth ``g0``."""
    if d < 2:
        raise DomainError(f"average degree must be >= 2, got {d}")
    if int(g0) != g0 or g0 < 3:
        raise DomainError(f"girth g0 must be an integer >= 3, got {g0}")
    g0 = int(g0)
    j = g0 // 2
    geo = sum(d**i for i in range(j))
    return 1.0 + d * geo if g0 % 2 else 2.0 * geo


def theorem3_capacity(gamma: int, g: int, c_xor: float = 0.0) -> float:
    GirthParams(gamma, g)
    return 9.0 * moore_n0(gamma / 4.0, g // 2) / 32.0 - SQRT2 * _check_cxor(c_xor)


def capacity(q: GuaranteeQuery) -> float:
    if isinstance(q.params, GirthParams):
        return theorem3_capacity(q.params.gamma, q.params.g, q.c_xor)
    return theorem2_capacity(q)


def correctable_weight(bound: float) -> int | None:
    """Largest integer weight strictly below ``bound``; None when no weight
    (not even zero) is guaranteed."""
    if bound <= 0:
        return None
    if math.isinf(bound):
        raise DomainError("bound is infinite")
    c = math.ceil(bound)
    return c - 1


def osmaj_comparison(gamma: int, c_xor: float) -> float:
    return gamma // 2 - c_xor


# -- expansion optimization --------------------------------------------------


def lemma7_slack(alpha, rho: int):
    """Expansion slack allowed by a set fraction ``alpha`` on a rho-right-regular graph."""
    alpha = np.asarray(alpha, dtype=float)
    covered = -np.expm1(rho * np.log1p(-alpha))
    return covered / (alpha * rho) - 0.875


def _alpha_total(alpha: float, rho: int) -> float:
    slack = max(float(lemma7_slack(alpha, rho)), 0.0)
    return 3.0 * (3.0 + 8.0 * slack) * alpha / 32.0


@dataclass(frozen=True)
class AlphaOptimum:
    rho: int
    c_xor_frac: float
    alpha_star: float
    slack_star: float
    alpha_total: float

    @property
    def guaranteed(self) -> bool:
        return self.alpha_total > 0

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "c_xor_frac": self.c_xor_frac,
            "alpha_star": self.alpha_star,
            "slack_star": self.slack_star,
            "alpha_total": self.alpha_total,
            "guaranteed": self.guaranteed,
        }


def feasibility_edge(rho: int) -> float:
    """Set fraction at which the allowed slack reaches zero."""
    return brentq(lambda a: float(lemma7_slack(a, rho)), 1e-12, 1.0 - 1e-12, xtol=1e-15, rtol=1e-15)


def _golden_max(f, a: float, b: float, rtol: float = GOLDEN_RTOL) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > rtol * max(abs(a), abs(b)):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def optimal_alpha_total(rho: int, c_xor_frac: float = 0.0) -> AlphaOptimum:
    """Maximize the guaranteed fraction of correctable errors over the set
    fraction alpha, with the slack tied to alpha and kept in (0, 1/8].

    The maximizer does not depend on ``c_xor_frac``, which enters as an
    additive penalty. When the unconstrained optimum lies outside the
    feasible set the supremum sits on the edge slack -> 0.
    """
    if rho < 8:
        raise DomainError(f"the expansion trade-off is considered for rho >= 8, got {rho}")
    _check_cxor(c_xor_frac)
    edge = feasibility_edge(rho)
    grid = edge * np.arange(1, GRID_POINTS + 1) / GRID_POINTS
    slack = np.clip(lemma7_slack(grid, rho), 0.0, None)
    values = 3.0 * (3.0 + 8.0 * slack) * grid / 32.0
    k = int(np.argmax(values))
    lo = grid[k - 1] if k > 0 else grid[0] / 2.0
    hi = grid[min(k + 1, GRID_POINTS - 1)]
    candidates = [grid[k], _golden_max(lambda a: _alpha_total(a, rho), lo, hi)]
    if k == GRID_POINTS - 1:
        candidates.append(edge)
    alpha_star = max(candidates, key=lambda a: _alpha_total(a, rho))
    best = _alpha_total(alpha_star, rho)
    slack_star = max(float(lemma7_slack(alpha_star, rho)), 0.0)
    return AlphaOptimum(rho, float(c_xor_frac), float(alpha_star), slack_star, float(best - SQRT2 * c_xor_frac))


def alpha_total_curve(rho: int, c_xor_fracs: Sequence[float]) -> list[dict]:
    base = optimal_alpha_total(rho, 0.0)
    return [
        {"c_xor_frac": float(c), "alpha_total": base.alpha_total - SQRT2 * float(c)} for c in c_xor_fracs
    ]


def zero_crossing(rho: int) -> float:
    """Smallest c_xor_frac at which no correction is guaranteed."""
    return optimal_alpha_total(rho, 0.0).alpha_total / SQRT2
