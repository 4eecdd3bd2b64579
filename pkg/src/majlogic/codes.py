"""Regular Tanner graphs: finite-geometry constructions, alist I/O, girth,
exact expansion checking and a GF(2) encoder."""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import AlistError, DomainError, InfeasibleError
from .gf import GF2m

DEFAULT_EXPANSION_BUDGET = 10**8


@dataclass(frozen=True)
class TannerGraph:
    """A (gamma, rho)-regular bipartite graph of variable and check nodes.

    ``var_adj[v]`` lists the checks of variable ``v`` and ``chk_adj[c]`` the
    variables of check ``c``; both orders are significant (they fix gate
    input order and survive an alist round trip).
    """

    n: int
    m: int
    var_adj: tuple[tuple[int, ...], ...]
    chk_adj: tuple[tuple[int, ...], ...]
    gamma: int
    rho: int

    def __post_init__(self):
        if len(self.var_adj) != self.n or len(self.chk_adj) != self.m:
            raise DomainError("adjacency length does not match n/m")
        for v, checks in enumerate(self.var_adj):
            if len(checks) != self.gamma:
                raise DomainError(f"variable {v} has degree {len(checks)}, expected gamma={self.gamma}")
            if len(set(checks)) != len(checks):
                raise DomainError(f"variable {v} has parallel edges")
            if any(not 0 <= c < self.m for c in checks):
                raise DomainError(f"variable {v} references a check outside 0..{self.m - 1}")
        for c, vars_ in enumerate(self.chk_adj):
            if len(vars_) != self.rho:
                raise DomainError(f"check {c} has degree {len(vars_)}, expected rho={self.rho}")
            if len(set(vars_)) != len(vars_):
                raise DomainError(f"check {c} has parallel edges")
        edges_v = {(v, c) for v, checks in enumerate(self.var_adj) for c in checks}
        edges_c = {(v, c) for c, vars_ in enumerate(self.chk_adj) for v in vars_}
        if edges_v != edges_c:
            raise DomainError("variable and check adjacency lists are not symmetric")

    @classmethod
    def from_var_adj(cls, var_adj: Sequence[Sequence[int]], m: int | None = None) -> TannerGraph:
        """Build a graph from variable neighbourhoods; check lists come out sorted."""
        var_adj = tuple(tuple(int(c) for c in checks) for checks in var_adj)
        if m is None:
            m = 1 + max(c for checks in var_adj for c in checks)
        chk: list[list[int]] = [[] for _ in range(m)]
        for v, checks in enumerate(var_adj):
            for c in checks:
                chk[c].append(v)
        degrees_v = {len(c) for c in var_adj}
        degrees_c = {len(c) for c in chk}
        if len(degrees_v) != 1 or len(degrees_c) != 1:
            raise DomainError("graph is not regular")
        return cls(len(var_adj), m, var_adj, tuple(tuple(c) for c in chk), degrees_v.pop(), degrees_c.pop())

    @classmethod
    def from_parity_matrix(cls, H) -> TannerGraph:
        H = np.asarray(H) % 2
        var_adj = [tuple(int(c) for c in np.flatnonzero(H[:, v])) for v in range(H.shape[1])]
        return cls.from_var_adj(var_adj, H.shape[0])

    def transpose(self) -> TannerGraph:
        """Swap the roles of variables and checks."""
        return TannerGraph(self.m, self.n, self.chk_adj, self.var_adj, self.rho, self.gamma)

    @property
    def num_edges(self) -> int:
        return self.n * self.gamma

    @cached_property
    def H(self) -> np.ndarray:
        H = np.zeros((self.m, self.n), dtype=np.uint8)
        for c, vars_ in enumerate(self.chk_adj):
            H[c, list(vars_)] = 1
        return H

    @cached_property
    def chk_array(self) -> np.ndarray:
        return np.array(self.chk_adj, dtype=np.intp).reshape(self.m, self.rho)

    @cached_property
    def edge_chk(self) -> np.ndarray:
        """Check of each gate; gates are numbered check by check."""
        return np.repeat(np.arange(self.m, dtype=np.intp), self.rho)

    @cached_property
    def edge_var(self) -> np.ndarray:
        return self.chk_array.reshape(-1)

    @cached_property
    def var_edges(self) -> np.ndarray:
        """(n, gamma) gate indices feeding each variable, in ``var_adj`` order."""
        index = {(int(c), int(v)): e for e, (c, v) in enumerate(zip(self.edge_chk, self.edge_var))}
        return np.array([[index[(c, v)] for c in self.var_adj[v]] for v in range(self.n)], dtype=np.intp)

    @cached_property
    def gate_inputs(self) -> np.ndarray:
        """(E, rho-1) variables read by each gate: its check's neighbours minus the target."""
        rows = []
        for c, vars_ in enumerate(self.chk_adj):
            for v in vars_:
                rows.append([u for u in vars_ if u != v])
        return np.array(rows, dtype=np.intp).reshape(self.num_edges, self.rho - 1)

    def edge_index(self, c: int, v: int) -> int:
        return c * self.rho + self.chk_adj[c].index(v)

    def syndrome(self, word) -> np.ndarray:
        word = np.asarray(word, dtype=np.uint8)
        return word[..., self.chk_array].sum(axis=-1, dtype=np.int64).astype(np.uint8) & 1

    def is_codeword(self, word) -> bool:
        word = np.asarray(word)
        if word.shape[-1] != self.n:
            return False
        return not self.syndrome(word).any()


# ---------------------------------------------------------------------------
# finite geometries


def _check_s(s: int) -> None:
    if not isinstance(s, (int, np.integer)) or not 1 <= s <= 6:
        raise DomainError(f"s must be an integer in 1..6, got {s!r}")


def _canonical_lines(lines: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    return sorted(tuple(sorted(line)) for line in lines)


def build_pg(s: int) -> TannerGraph:
    """Point-line incidence of the projective plane PG(2, 2^s).

    Variables are points, checks are lines; n = m = q^2 + q + 1 and
    gamma = rho = q + 1 with q = 2^s.
    """
    _check_s(s)
    F = GF2m(s)
    q = F.order
    # normalised homogeneous coordinates: first nonzero coordinate equals 1
    points = [(1, y, z) for y in range(q) for z in range(q)] + [(0, 1, z) for z in range(q)] + [(0, 0, 1)]
    points.sort()
    lines = []
    for a, b, c in points:  # dual coordinates range over the same set
        lines.append(
            [
                i
                for i, (x, y, z) in enumerate(points)
                if F.mul(a, x) ^ F.mul(b, y) ^ F.mul(c, z) == 0
            ]
        )
    lines = _canonical_lines(lines)
    var_adj: list[list[int]] = [[] for _ in points]
    for li, line in enumerate(lines):
        for pt in line:
            var_adj[pt].append(li)
    return TannerGraph.from_var_adj(var_adj, len(lines))


def build_ag(s: int) -> TannerGraph:
    """Line-point incidence of the affine plane AG(2, 2^s).

    Variables are the q(q+1) lines and checks the q^2 points, which gives
    gamma = q and rho = q + 1.
    """
    _check_s(s)
    F = GF2m(s)
    q = F.order
    lines = []
    for a in range(q):
        for b in range(q):
            lines.append([x * q + (F.mul(a, x) ^ b) for x in range(q)])  # y = a*x + b
    for c in range(q):
        lines.append([c * q + y for y in range(q)])  # x = c
    lines = _canonical_lines(lines)
    return TannerGraph.from_var_adj(lines, q * q)


def geometry_params(family: str, s: int) -> dict:
    """Nominal parameters of AG/PG codes, including the design minimum distance.

    ``d_min`` is metadata only; it is not verified by this package.
    """
    _check_s(s)
    q = 1 << s
    if family == "pg":
        return {"n": q * q + q + 1, "m": q * q + q + 1, "gamma": q + 1, "rho": q + 1, "d_min": q + 2}
    if family == "ag":
        return {"n": q * (q + 1), "m": q * q, "gamma": q, "rho": q + 1, "d_min": q + 1}
    raise DomainError(f"unknown family {family!r} (expected 'ag' or 'pg')")


# ---------------------------------------------------------------------------
# alist


def to_alist(g: TannerGraph) -> str:
    lines = [
        f"{g.n} {g.m}",
        f"{g.gamma} {g.rho}",
        " ".join([str(g.gamma)] * g.n),
        " ".join([str(g.rho)] * g.m),
    ]
    lines += [" ".join(str(c + 1) for c in checks) for checks in g.var_adj]
    lines += [" ".join(str(v + 1) for v in vars_) for vars_ in g.chk_adj]
    return "\n".join(lines) + "\n"


def from_alist(text: str) -> TannerGraph:
    """Parse MacKay's alist format (1-indexed, zero padding allowed).

    Only regular graphs are accepted.
    """
    raw = text.splitlines()
    rows: list[tuple[int, list[int]]] = []
    for lineno, line in enumerate(raw, start=1):
        if not line.strip():
            continue
        try:
            rows.append((lineno, [int(tok) for tok in line.split()]))
        except ValueError:
            raise AlistError(f"non-integer token in {line.strip()!r}", line=lineno) from None

    def take(k: int, what: str) -> tuple[int, list[int]]:
        if k >= len(rows):
            raise AlistError(f"unexpected end of file while reading {what}", line=len(raw) + 1)
        return rows[k]

    ln, head = take(0, "header")
    if len(head) != 2:
        raise AlistError("expected 'n m'", line=ln)
    n, m = head
    if n <= 0 or m <= 0:
        raise AlistError("n and m must be positive", line=ln)
    ln, maxdeg = take(1, "max degrees")
    if len(maxdeg) != 2:
        raise AlistError("expected 'max_col_degree max_row_degree'", line=ln)
    ln_cw, col_w = take(2, "column degrees")
    if len(col_w) != n:
        raise AlistError(f"expected {n} column degrees, got {len(col_w)}", line=ln_cw)
    ln_rw, row_w = take(3, "row degrees")
    if len(row_w) != m:
        raise AlistError(f"expected {m} row degrees, got {len(row_w)}", line=ln_rw)

    def read_lists(start: int, count: int, bound: int, degrees: list[int], kind: str, limit: int):
        out = []
        for i in range(count):
            ln, entries = take(start + i, f"{kind} {i + 1}")
            if len(entries) > limit:
                raise AlistError(f"{kind} {i + 1} has {len(entries)} entries, max degree is {limit}", line=ln, node=f"{kind} {i + 1}")
            nz = [e for e in entries if e != 0]
            if any(e < 0 or e > bound for e in nz):
                raise AlistError(f"{kind} {i + 1} has an index outside 1..{bound}", line=ln, node=f"{kind} {i + 1}")
            first_zero = entries.index(0) if 0 in entries else len(entries)
            if any(entries[first_zero:]):
                raise AlistError(f"{kind} {i + 1} has zero padding before real entries", line=ln, node=f"{kind} {i + 1}")
            if len(nz) != degrees[i]:
                raise AlistError(
                    f"{kind} {i + 1} lists {len(nz)} neighbours but its declared degree is {degrees[i]}",
                    line=ln,
                    node=f"{kind} {i + 1}",
                )
            if len(set(nz)) != len(nz):
                raise AlistError(f"{kind} {i + 1} repeats a neighbour", line=ln, node=f"{kind} {i + 1}")
            out.append([e - 1 for e in nz])
        return out

    var_lists = read_lists(4, n, m, col_w, "variable", maxdeg[0])
    chk_lists = read_lists(4 + n, m, n, row_w, "check", maxdeg[1])
    if 4 + n + m < len(rows):
        raise AlistError("trailing data after check lists", line=rows[4 + n + m][0])

    for v, deg in enumerate(col_w):
        if deg != col_w[0]:
            raise AlistError(f"irregular graph: variable {v + 1} has degree {deg}, variable 1 has {col_w[0]}", node=f"variable {v + 1}")
    for c, deg in enumerate(row_w):
        if deg != row_w[0]:
            raise AlistError(f"irregular graph: check {c + 1} has degree {deg}, check 1 has {row_w[0]}", node=f"check {c + 1}")

    for v, checks in enumerate(var_lists):
        for c in checks:
            if v not in chk_lists[c]:
                raise AlistError(f"variable {v + 1} lists check {c + 1} but not vice versa", node=f"variable {v + 1}")
    for c, vars_ in enumerate(chk_lists):
        for v in vars_:
            if c not in var_lists[v]:
                raise AlistError(f"check {c + 1} lists variable {v + 1} but not vice versa", node=f"check {c + 1}")

    return TannerGraph(
        n, m, tuple(map(tuple, var_lists)), tuple(map(tuple, chk_lists)), col_w[0], row_w[0]
    )


def read_alist(path) -> TannerGraph:
    with open(path, encoding="ascii") as fh:
        return from_alist(fh.read())


def write_alist(g: TannerGraph, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(to_alist(g))


# ---------------------------------------------------------------------------
# structure


def girth(g: TannerGraph) -> float:
    """Length of the shortest cycle, or ``math.inf`` for a forest."""
    n = g.n
    adj = [list(g.var_adj[v]) for v in range(n)]
    adj = [[n + c for c in nbrs] for nbrs in adj] + [list(vars_) for vars_ in g.chk_adj]
    best = math.inf
    for root in range(n):  # every cycle contains a variable node
        dist = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] >= best:
                break
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w:
                    best = min(best, dist[u] + dist[w] + 1)
        if best == 4:
            break
    return best


@dataclass(frozen=True)
class ExpansionVerdict:
    expands: bool
    witness: tuple[int, ...] | None
    subsets_checked: int


def check_expansion(
    g: TannerGraph,
    alpha: float,
    delta_factor: float,
    budget: int = DEFAULT_EXPANSION_BUDGET,
) -> ExpansionVerdict:
    """Exhaustively test whether every set S of at most floor(alpha*n) variables
    reaches at least ``delta_factor * gamma * |S|`` checks.

    Subsets are scanned by increasing size, so a returned witness is a
    smallest violating set (lexicographically first among those).
    """
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if delta_factor <= 0:
        raise DomainError(f"delta_factor must be positive, got {delta_factor}")
    kmax = math.floor(alpha * g.n + 1e-9)
    total = sum(math.comb(g.n, k) for k in range(1, kmax + 1))
    if total > budget:
        raise InfeasibleError(
            f"infeasible at this size: {total} subsets exceed the budget of {budget}"
        )
    masks = [sum(1 << c for c in checks) for checks in g.var_adj]
    per_var = delta_factor * g.gamma
    checked = 0
    for k in range(1, kmax + 1):
        need = per_var * k - 1e-9
        for subset in itertools.combinations(range(g.n), k):
            checked += 1
            union = 0
            for v in subset:
                union |= masks[v]
            if union.bit_count() < need:
                return ExpansionVerdict(False, subset, checked)
    return ExpansionVerdict(True, None, checked)


# ---------------------------------------------------------------------------
# encoding


def gf2_nullspace(H) -> np.ndarray:
    """Basis (rows) of the right null space of H over GF(2)."""
    A = (np.asarray(H, dtype=np.uint8) & 1).copy()
    rows, cols = A.shape
    pivots = []
    r = 0
    for col in range(cols):
        if r == rows:
            break
        hits = np.flatnonzero(A[r:, col])
        if hits.size == 0:
            continue
        piv = r + hits[0]
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        others = np.flatnonzero(A[:, col])
        others = others[others != r]
        A[others] ^= A[r]
        pivots.append(col)
        r += 1
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for row, pc in enumerate(pivots):
            basis[i, pc] = A[row, f]
    return basis


def encoder_from_parity(g: TannerGraph) -> np.ndarray:
    """Generator basis (k x n) spanning the code of ``g``; k may be zero."""
    return gf2_nullspace(g.H)


def random_codeword(basis: np.ndarray, seed: int) -> np.ndarray:
    basis = np.asarray(basis, dtype=np.uint8)
    rng = np.random.default_rng(seed)
    coeffs = rng.integers(0, 2, size=basis.shape[0], dtype=np.uint8)
    return combine(basis, coeffs)


def combine(basis: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """GF(2) linear combination(s) of basis rows; ``coeffs`` may be batched."""
    coeffs = np.asarray(coeffs, dtype=np.int64)
    return (coeffs @ basis.astype(np.int64) & 1).astype(np.uint8)


def hamming_distance(a, b) -> int:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DomainError(f"length mismatch: {a.shape} vs {b.shape}")
    return int(np.count_nonzero(a != b))
