"""Exact counts of labelled r-graphs without short Berge cycles.

All counts are produced by one depth-first search over the r-subsets of
``1..n`` in lexicographic order: a branch only ever appends an edge larger
than the last one, and a branch is cut as soon as the partial hypergraph
contains a forbidden cycle.  Both forbidden families used here (all cycles of
length at most ``l``, or cycles of length exactly ``l``) are closed under
adding edges, so the cut never loses a solution.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Optional

from .encode import lambda_param
from .hypercore import CycleGuard, GirthGuard, Hypergraph, complete

__all__ = [
    "CensusResult",
    "InequalityReport",
    "SizeGuardError",
    "DEFAULT_BUDGET",
    "estimate_nodes",
    "iter_hypergraphs",
    "count_girth",
    "count_single_forbidden",
    "count_at_most",
    "verify_reduction_general",
    "verify_reduction_single",
    "default_single_constant",
    "max_girth_subgraph",
    "ex_girth",
    "ms_bound",
    "resolve_workers",
]

DEFAULT_BUDGET = 10**8
MODES = ("girth", "single")


class SizeGuardError(RuntimeError):
    """The estimated search size exceeds the configured node budget."""

    def __init__(self, estimate: int, budget: int):
        super().__init__(f"estimated {estimate} search nodes exceeds budget {budget}")
        self.estimate = estimate
        self.budget = budget


@dataclass
class CensusResult:
    n: int
    m: int
    r: int
    l: int
    mode: str
    count: int
    nodes_explored: int
    elapsed: float = field(default=0.0, compare=False)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class InequalityReport:
    name: str
    n: int
    m: int
    r: int
    l: int
    lhs: int
    rhs: Optional[int]
    exponent: int
    holds: bool
    log2_lhs: float
    log2_rhs: float
    c: Optional[float] = None
    min_c: Optional[float] = None

    def as_dict(self) -> dict:
        return asdict(self)


def resolve_workers(workers: Optional[int]) -> int:
    if workers is None:
        workers = int(os.environ.get("BERGE_LAB_THREADS", "1") or 1)
    return max(1, int(workers))


def _check(n, m, r, l):
    for name, val in (("n", n), ("r", r), ("l", l)):
        if not isinstance(val, int) or val < 1:
            raise ValueError(f"{name} must be a positive integer, got {val!r}")
    if not isinstance(m, int) or m < 0:
        raise ValueError(f"m must be a non-negative integer, got {m!r}")
    if r < 2:
        raise ValueError("uniformity must be at least 2")
    if l < 2:
        raise ValueError("cycle length bound must be at least 2")


def _edge_cap(n: int, r: int, l: int, mode: str) -> int:
    """Upper bound on the edge count of any admissible hypergraph."""
    total = math.comb(n, r)
    if mode == "girth" and r >= 3:
        # linear: each pair of vertices lies in at most one hyperedge
        total = min(total, math.comb(n, 2) // math.comb(r, 2))
    return total


def estimate_nodes(n: int, m: int, r: int, l: int = 2, mode: str = "girth") -> int:
    """Node count of the search tree with no pruning beyond the size cap."""
    N = math.comb(n, r)
    top = min(m, _edge_cap(n, r, l, mode))
    return sum(math.comb(N, j) for j in range(top + 1))


def _guard(mode: str, n: int, l: int):
    if mode == "girth":
        return GirthGuard(n, l)
    if mode == "single":
        return CycleGuard(n, l)
    raise ValueError(f"unknown mode {mode!r}")


def _dfs_count(universe, guard, start, depth_left):
    """(count, nodes) of the subtree below the current partial hypergraph."""
    if depth_left == 0:
        return 1, 1
    count = 0
    nodes = 1
    N = len(universe)
    # not enough edges left to reach the target size
    for j in range(start, N - depth_left + 1):
        e = universe[j]
        if guard.admits(e):
            guard.add(e)
            c, k = _dfs_count(universe, guard, j + 1, depth_left - 1)
            guard.pop()
            count += c
            nodes += k
    return count, nodes


def _subtree_task(args):
    n, m, r, l, mode, first = args
    universe = list(combinations(range(1, n + 1), r))
    guard = _guard(mode, n, l)
    guard.add(universe[first])
    return _dfs_count(universe, guard, first + 1, m - 1)


def _count(n, m, r, l, mode, budget, workers) -> CensusResult:
    _check(n, m, r, l)
    est = estimate_nodes(n, m, r, l, mode)
    if est > budget:
        raise SizeGuardError(est, budget)
    t0 = time.perf_counter()
    universe = list(combinations(range(1, n + 1), r))
    workers = resolve_workers(workers)
    if m == 0:
        count, nodes = 1, 1
    elif m > len(universe):
        count, nodes = 0, 1
    else:
        firsts = range(0, len(universe) - m + 1)
        tasks = [(n, m, r, l, mode, j) for j in firsts]
        if workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(_subtree_task, tasks))
        else:
            parts = [_subtree_task(t) for t in tasks]
        # root plus subtrees, summed in task order
        count = sum(p[0] for p in parts)
        nodes = 1 + sum(p[1] for p in parts)
    return CensusResult(n, m, r, l, mode, count, nodes, time.perf_counter() - t0)


def count_girth(n: int, m: int, r: int, l: int, budget: int = DEFAULT_BUDGET,
                workers: Optional[int] = None) -> CensusResult:
    """Number of r-graphs on ``1..n`` with ``m`` hyperedges and girth larger than ``l``."""
    return _count(n, m, r, l, "girth", budget, workers)


def count_single_forbidden(n: int, m: int, r: int, l: int, budget: int = DEFAULT_BUDGET,
                           workers: Optional[int] = None) -> CensusResult:
    """Number of r-graphs on ``1..n`` with ``m`` hyperedges and no Berge cycle of length exactly ``l``."""
    return _count(n, m, r, l, "single", budget, workers)


def count_at_most(n: int, m: int, r: int, l: int, mode: str = "girth",
                  budget: int = DEFAULT_BUDGET, workers: Optional[int] = None) -> int:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    return sum(_count(n, j, r, l, mode, budget, workers).count for j in range(m + 1))


def iter_hypergraphs(n: int, m: int, r: int, l: int, mode: str = "girth") -> Iterator[Hypergraph]:
    """Yield every hypergraph counted by the corresponding census, in lexicographic order."""
    _check(n, m, r, l)
    universe = list(combinations(range(1, n + 1), r))
    guard = _guard(mode, n, l)

    def walk(start, left):
        if left == 0:
            yield Hypergraph(n, r, tuple(guard.edges))
            return
        for j in range(start, len(universe) - left + 1):
            e = universe[j]
            if guard.admits(e):
                guard.add(e)
                yield from walk(j + 1, left - 1)
                guard.pop()

    yield from walk(0, m)


# --------------------------------------------------------------------------
# inequalities


def _log2(x: int) -> float:
    return math.log2(x) if x > 0 else -math.inf


def verify_reduction_general(n: int, m: int, r: int, l: int, budget: int = DEFAULT_BUDGET,
                             workers: Optional[int] = None) -> InequalityReport:
    """Compare N_m^r(n, l) with N_m^2(n, l) ** (r - 1 + lambda), both counted exactly."""
    lam = lambda_param(r, l)
    exponent = r - 1 + lam
    lhs = count_girth(n, m, r, l, budget, workers).count
    base = count_girth(n, m, 2, l, budget, workers).count
    rhs = base**exponent
    return InequalityReport("reduction_general", n, m, r, l, lhs, rhs, exponent, lhs <= rhs,
                            _log2(lhs), exponent * _log2(base))


def default_single_constant(r: int, l: int) -> int:
    """Slack constant obtained by chaining the one-step shadow reduction from r down to 2.

    Step ``j`` (from j-graphs to (j-1)-graphs) costs ``2**((1 + l^2 j^2) m)`` and
    raises the previous count to the power ``j``; unrolling gives
    ``sum_j (1 + l^2 j^2) * r! / j!`` over ``j = 3..r``.
    """
    return sum((1 + l * l * j * j) * (math.factorial(r) // math.factorial(j)) for j in range(3, r + 1))


def verify_reduction_single(n: int, m: int, r: int, l: int, c=None, budget: int = DEFAULT_BUDGET,
                            workers: Optional[int] = None) -> InequalityReport:
    """Compare N_m^r(n, C_l) with 2**(c m) * N_[m]^2(n, C_l) ** (r!/2).

    ``c`` may be any non-negative rational; the comparison is exact.  ``rhs`` is
    reported as an integer only when ``c * m`` is an integer.
    """
    if r < 3 or l < 3:
        raise ValueError("needs r >= 3 and l >= 3")
    c = Fraction(default_single_constant(r, l) if c is None else c)
    if c < 0:
        raise ValueError("c must be non-negative")
    exponent = math.factorial(r) // 2
    lhs = count_single_forbidden(n, m, r, l, budget, workers).count
    base = count_at_most(n, m, 2, l, "single", budget, workers)
    cm = c * m
    # lhs <= 2^(p/q) * base^e  <=>  lhs^q <= 2^p * base^(e q)
    p, q = cm.numerator, cm.denominator
    holds = lhs**q <= (2**p) * base ** (exponent * q)
    rhs = (2**p) * base**exponent if q == 1 else None
    log2_base = _log2(base)
    if m == 0 or lhs == 0:
        min_c = 0.0
    else:
        min_c = max(0.0, (_log2(lhs) - exponent * log2_base) / m)
    return InequalityReport("reduction_single", n, m, r, l, lhs, rhs, exponent, holds,
                            _log2(lhs), float(cm) + exponent * log2_base, float(c), min_c)


# --------------------------------------------------------------------------
# extremal numbers


def max_girth_subgraph(H: Hypergraph, l: int, budget: int = DEFAULT_BUDGET) -> tuple[int, Hypergraph]:
    """Largest subgraph of ``H`` with girth larger than ``l`` (branch and bound).

    The bound at a node is the current size plus the smaller of the number of
    remaining candidate edges and, for r >= 3, the number of still-unused
    vertex pairs divided by C(r, 2).
    """
    r, n = H.r, H.n
    universe = list(H.edges)
    cap = _edge_cap(n, r, l, "girth") if r >= 3 else len(universe)
    cap = min(cap, len(universe))
    est = sum(math.comb(len(universe), j) for j in range(cap + 1))
    if est > budget:
        raise SizeGuardError(est, budget)
    pairs_per_edge = math.comb(r, 2)
    guard = GirthGuard(n, l)
    used_pairs: set = set()
    total_pairs = len({p for e in universe for p in combinations(e, 2)})
    best: list = [0, ()]

    def bound(start, size):
        rest = len(universe) - start
        if r >= 3:
            rest = min(rest, (total_pairs - len(used_pairs)) // pairs_per_edge)
        return size + rest

    def walk(start, size):
        if size > best[0]:
            best[0], best[1] = size, tuple(guard.edges)
        if best[0] >= cap:
            return
        for j in range(start, len(universe)):
            if bound(j, size) <= best[0]:
                return
            e = universe[j]
            if guard.admits(e):
                guard.add(e)
                new = [p for p in combinations(e, 2)]
                used_pairs.update(new)
                walk(j + 1, size + 1)
                used_pairs.difference_update(new)
                guard.pop()

    walk(0, 0)
    return best[0], Hypergraph(n, r, tuple(sorted(best[1])))


def ex_girth(n: int, r: int, l: int, budget: int = DEFAULT_BUDGET) -> tuple[int, Hypergraph]:
    """Maximum edge count of an r-graph on ``1..n`` with girth larger than ``l``, plus a witness."""
    _check(n, 0, r, l)
    return max_girth_subgraph(complete(n, r), l, budget)


def ms_bound(n: float, m: float, l: int, c: float) -> float:
    """Natural log of e^{cm} (log n)^{(k-1)m} (n^{1+1/k}/m)^{km}, with k = floor(l/2)."""
    if n < 3 or m < 1 or l < 3:
        raise ValueError("ms_bound needs n >= 3, m >= 1 and l >= 3")
    k = l // 2
    return c * m + (k - 1) * m * math.log(math.log(n)) + k * m * ((1 + 1 / k) * math.log(n) - math.log(m))
