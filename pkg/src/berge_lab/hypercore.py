"""Labeled r-uniform hypergraphs, shadows, Berge cycles and girth.

Vertices are the integers ``1..n``.  Every hyperedge is stored as a strictly
increasing tuple and the edge list is kept in lexicographic order, so two
hypergraphs with the same edge set compare equal.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Sequence

Edge = tuple[int, ...]

__all__ = [
    "Hypergraph",
    "HypergraphError",
    "BergeCycleWitness",
    "Shadow",
    "GirthGuard",
    "validate",
    "from_json",
    "to_json",
    "complete",
    "shadow",
    "is_linear",
    "girth",
    "girth_exceeds",
    "find_berge_cycle",
    "has_berge_cycle_of_length",
    "berge_cycle_profile",
    "count_berge_cycles",
    "max_i_degree",
]


class HypergraphError(ValueError):
    """Raised for malformed hypergraph input."""


@dataclass(frozen=True)
class Hypergraph:
    n: int
    r: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise HypergraphError(f"vertex count must be a non-negative integer, got {self.n!r}")
        if not isinstance(self.r, int) or self.r < 1:
            raise HypergraphError(f"uniformity must be a positive integer, got {self.r!r}")
        prev = None
        for e in self.edges:
            if len(e) != self.r:
                raise HypergraphError(f"hyperedge {e} does not have {self.r} vertices")
            if any(a >= b for a, b in zip(e, e[1:])):
                raise HypergraphError(f"hyperedge {e} is not strictly increasing")
            if e[0] < 1 or e[-1] > self.n:
                raise HypergraphError(f"hyperedge {e} has a vertex outside 1..{self.n}")
            if prev is not None and e <= prev:
                raise HypergraphError("edge list is not sorted and duplicate-free")
            prev = e

    @property
    def m(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, e) -> bool:
        return tuple(sorted(e)) in self.edge_set

    @property
    def edge_set(self) -> frozenset[Edge]:
        # cached on first use; the dataclass is frozen so bypass __setattr__
        try:
            return self.__dict__["_edge_set"]
        except KeyError:
            s = frozenset(self.edges)
            object.__setattr__(self, "_edge_set", s)
            return s

    def covered_vertices(self) -> set[int]:
        return {v for e in self.edges for v in e}

    def incidence(self) -> list[list[int]]:
        """``inc[v]`` lists the indices of the hyperedges containing ``v``."""
        inc: list[list[int]] = [[] for _ in range(self.n + 1)]
        for j, e in enumerate(self.edges):
            for v in e:
                inc[v].append(j)
        return inc

    def subgraph(self, edges: Iterable[Sequence[int]]) -> "Hypergraph":
        return validate(edges, self.n, self.r)

    def add_edges(self, edges: Iterable[Sequence[int]]) -> "Hypergraph":
        return validate(list(self.edges) + [tuple(e) for e in edges], self.n, self.r)


def validate(raw_edges: Iterable[Sequence[int]], n: int, r: int) -> Hypergraph:
    """Build a canonical :class:`Hypergraph` from arbitrary integer tuples.

    Vertices inside an edge and the edges themselves are sorted.  Wrong arity,
    repeated vertices, out-of-range vertices and duplicate hyperedges raise
    :class:`HypergraphError`.
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise HypergraphError(f"n must be a positive integer, got {n!r}")
    if not isinstance(r, int) or isinstance(r, bool) or r < 1:
        raise HypergraphError(f"r must be a positive integer, got {r!r}")
    seen = set()
    for raw in raw_edges:
        try:
            e = tuple(sorted(int(v) for v in raw))
        except (TypeError, ValueError) as exc:
            raise HypergraphError(f"hyperedge {raw!r} is not a sequence of integers") from exc
        if len(e) != r or len(set(e)) != r:
            raise HypergraphError(f"hyperedge {tuple(raw)} must have exactly {r} distinct vertices")
        if e[0] < 1 or e[-1] > n:
            raise HypergraphError(f"hyperedge {tuple(raw)} has a vertex outside 1..{n}")
        if e in seen:
            raise HypergraphError(f"duplicate hyperedge {e}")
        seen.add(e)
    return Hypergraph(n, r, tuple(sorted(seen)))


def from_json(obj) -> Hypergraph:
    """Parse the ``{"n": .., "r": .., "edges": [[..], ..]}`` document."""
    if not isinstance(obj, dict):
        raise HypergraphError("hypergraph JSON must be an object")
    missing = {"n", "r", "edges"} - set(obj)
    if missing:
        raise HypergraphError(f"hypergraph JSON is missing keys: {sorted(missing)}")
    if not isinstance(obj["edges"], list):
        raise HypergraphError("'edges' must be a list")
    for key in ("n", "r"):
        if not isinstance(obj[key], int) or isinstance(obj[key], bool):
            raise HypergraphError(f"'{key}' must be an integer")
    return validate(obj["edges"], obj["n"], obj["r"])


def to_json(H: Hypergraph) -> dict:
    return {"n": H.n, "r": H.r, "edges": [list(e) for e in H.edges]}


def complete(n: int, r: int) -> Hypergraph:
    """The complete r-graph on ``1..n``."""
    return Hypergraph(n, r, tuple(combinations(range(1, n + 1), r)))


# --------------------------------------------------------------------------
# shadows, linearity, degrees


@dataclass(frozen=True)
class Shadow:
    n: int
    k: int
    sets: tuple[Edge, ...]

    def __len__(self) -> int:
        return len(self.sets)


def shadow(H: Hypergraph, k: int) -> Shadow:
    """All k-sets lying inside some hyperedge of ``H``."""
    if not 1 <= k <= H.r:
        raise HypergraphError(f"shadow uniformity must lie in 1..{H.r}, got {k}")
    sets = {s for e in H.edges for s in combinations(e, k)}
    return Shadow(H.n, k, tuple(sorted(sets)))


def is_linear(H: Hypergraph) -> bool:
    seen = set()
    for e in H.edges:
        for pair in combinations(e, 2):
            if pair in seen:
                return False
            seen.add(pair)
    return True


def max_i_degree(H: Hypergraph, i: int) -> int:
    """Largest number of hyperedges containing a common i-set."""
    if not 1 <= i <= H.r:
        raise HypergraphError(f"i must lie in 1..{H.r}, got {i}")
    counts = Counter(s for e in H.edges for s in combinations(e, i))
    return max(counts.values(), default=0)


# --------------------------------------------------------------------------
# Berge cycles


@dataclass(frozen=True)
class BergeCycleWitness:
    """Vertices ``v_1..v_l`` and hyperedge indices ``e_1..e_l`` of a Berge cycle.

    ``e_i`` contains ``v_i`` and ``v_{i+1}``; ``e_l`` closes the cycle through
    ``v_l`` and ``v_1``.
    """

    length: int
    vertices: tuple[int, ...]
    hyperedges: tuple[int, ...]

    def verify(self, H: Hypergraph) -> bool:
        ell = self.length
        if ell < 2 or len(self.vertices) != ell or len(self.hyperedges) != ell:
            return False
        if len(set(self.vertices)) != ell or len(set(self.hyperedges)) != ell:
            return False
        if not all(0 <= j < H.m for j in self.hyperedges):
            return False
        for i in range(ell):
            e = H.edges[self.hyperedges[i]]
            if self.vertices[i] not in e or self.vertices[(i + 1) % ell] not in e:
                return False
        return True

    def edge_tuples(self, H: Hypergraph) -> list[Edge]:
        return [H.edges[j] for j in self.hyperedges]


def _shortest_incidence_cycle(H: Hypergraph):
    """BFS girth of the vertex/hyperedge incidence graph.

    Returns ``(length, cycle_nodes)`` with nodes ``0..n-1`` for vertices and
    ``n..n+m-1`` for hyperedges, or ``(inf, None)``.
    """
    n, m = H.n, H.m
    adj: list[list[int]] = [[] for _ in range(n + m)]
    for j, e in enumerate(H.edges):
        for v in e:
            adj[v - 1].append(n + j)
            adj[n + j].append(v - 1)

    best = math.inf
    best_cycle = None
    for root in range(n):
        if not adj[root]:
            continue
        dist = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        found = None
        while queue:
            u = queue.popleft()
            du = dist[u]
            # a non-tree edge at u closes a walk of length >= 2*du
            if 2 * du >= best:
                break
            for w in adj[u]:
                if w not in dist:
                    dist[w] = du + 1
                    parent[w] = u
                    queue.append(w)
                elif w != parent[u]:
                    length = du + dist[w] + 1
                    if length < best:
                        best = length
                        found = (u, w)
        if found is not None:
            best_cycle = _close_walk(parent, *found)
    return best, best_cycle


def _close_walk(parent, u, w) -> list[int]:
    def to_root(x):
        path = []
        while x != -1:
            path.append(x)
            x = parent[x]
        return path

    pu, pw = to_root(u), to_root(w)
    # pu = u..root, pw = w..root; join into root..u, w..(child of root)
    return pu[::-1] + pw[:-1]


def _witness_from_cycle(H: Hypergraph, nodes: list[int]) -> BergeCycleWitness:
    n = H.n
    start = next(i for i, x in enumerate(nodes) if x < n)
    nodes = nodes[start:] + nodes[:start]
    vertices = tuple(x + 1 for x in nodes[0::2])
    edges = tuple(x - n for x in nodes[1::2])
    w = BergeCycleWitness(len(vertices), vertices, edges)
    assert w.verify(H), "incidence cycle did not map to a Berge cycle"
    return w


def girth(H: Hypergraph):
    """Length of a shortest Berge cycle, or ``math.inf`` if there is none.

    A Berge l-cycle is the same thing as a 2l-cycle in the bipartite
    vertex/hyperedge incidence graph, so this is half that graph's girth.
    """
    length, _ = _shortest_incidence_cycle(H)
    return length if length == math.inf else length // 2


def find_berge_cycle(H: Hypergraph, l_max: int) -> Optional[BergeCycleWitness]:
    """A shortest Berge cycle of ``H`` if its length is at most ``l_max``."""
    if l_max < 2:
        raise ValueError("l_max must be at least 2")
    length, nodes = _shortest_incidence_cycle(H)
    if nodes is None or length // 2 > l_max:
        return None
    return _witness_from_cycle(H, nodes)


class GirthGuard:
    """Mutable hypergraph under construction whose girth is kept above ``l``.

    ``admits(e)`` answers whether adding ``e`` keeps the girth above ``l``.
    Since the current girth already exceeds ``l``, only cycles through ``e``
    matter, and such a cycle of length ``j`` is a Berge path of length
    ``j - 1`` between two vertices of ``e``.  Adding edges never raises girth,
    which is what makes this usable for pruning.
    """

    def __init__(self, n: int, l: int):
        if l < 1:
            raise ValueError("l must be positive")
        self.n = n
        self.l = l
        self.inc: list[list[Edge]] = [[] for _ in range(n + 1)]
        self.edges: list[Edge] = []

    def admits(self, e: Edge) -> bool:
        depth = self.l - 1
        if depth <= 0:
            return True
        inc = self.inc
        targets = set(e)
        for u in e[:-1]:
            targets.discard(u)
            if not inc[u]:
                continue
            dist = {u: 0}
            frontier = [u]
            for d in range(1, depth + 1):
                nxt = []
                for x in frontier:
                    for f in inc[x]:
                        for y in f:
                            if y not in dist:
                                if y in targets:
                                    return False
                                dist[y] = d
                                nxt.append(y)
                if not nxt:
                    break
                frontier = nxt
        return True

    def add(self, e: Edge) -> None:
        self.edges.append(e)
        for v in e:
            self.inc[v].append(e)

    def pop(self) -> Edge:
        e = self.edges.pop()
        for v in e:
            self.inc[v].pop()
        return e


class CycleGuard(GirthGuard):
    """Like :class:`GirthGuard` but forbids only Berge cycles of length exactly ``l``."""

    def admits(self, e: Edge) -> bool:
        need = self.l - 1
        if need < 1:
            return True
        inc = self.inc
        used_edges: set[Edge] = set()
        for idx, u in enumerate(e[:-1]):
            targets = set(e[idx + 1:])
            if not inc[u]:
                continue
            visited = {u}
            if self._path_exists(u, targets, need, visited, used_edges):
                return False
        return True

    def _path_exists(self, x, targets, left, visited, used_edges) -> bool:
        for f in self.inc[x]:
            if f in used_edges:
                continue
            used_edges.add(f)
            for y in f:
                if y in visited:
                    continue
                if left == 1:
                    if y in targets:
                        used_edges.discard(f)
                        return True
                    continue
                visited.add(y)
                hit = self._path_exists(y, targets, left - 1, visited, used_edges)
                visited.discard(y)
                if hit:
                    used_edges.discard(f)
                    return True
            used_edges.discard(f)
        return False


def girth_exceeds(H: Hypergraph, l: int) -> bool:
    """``girth(H) > l`` using bounded-depth searches instead of a full BFS.

    Answers are memoized on ``H``, which is immutable.
    """
    memo = H.__dict__.setdefault("_exceeds", {})
    if l not in memo:
        if not is_linear(H):
            memo[l] = False
        elif l == 2:
            memo[l] = True
        else:
            guard = GirthGuard(H.n, l)
            ok = True
            for e in H.edges:
                if not guard.admits(e):
                    ok = False
                    break
                guard.add(e)
            memo[l] = ok
    return memo[l]


def has_berge_cycle_of_length(H: Hypergraph, l: int) -> bool:
    """Whether ``H`` contains a Berge cycle of length exactly ``l``."""
    if l < 2:
        raise ValueError("Berge cycles have length at least 2")
    guard = CycleGuard(H.n, l)
    for e in H.edges:
        if not guard.admits(e):
            return True
        guard.add(e)
    return False


def berge_cycle_profile(H: Hypergraph, l: int) -> Counter:
    """Number of Berge l-cycles of ``H`` keyed by the size of their edge union.

    Cycles are counted as cyclic sequences ``(v_1, e_1, ..., v_l, e_l)`` up to
    rotation and reflection.  Each class has exactly one representative with
    ``v_1`` the smallest cycle vertex and ``e_1 < e_l`` (as edge indices), and
    only those representatives are enumerated.
    """
    if l < 2:
        raise ValueError("Berge cycles have length at least 2")
    profile: Counter = Counter()
    if H.m < l:
        return profile
    inc = H.incidence()
    edges = H.edges

    def extend(path_v, path_e, used_e):
        last = path_v[-1]
        if len(path_v) == l:
            v1 = path_v[0]
            for j in inc[last]:
                if j in used_e or j <= path_e[0]:
                    continue
                if v1 in edges[j]:
                    union = set()
                    for k in path_e:
                        union.update(edges[k])
                    union.update(edges[j])
                    profile[len(union)] += 1
            return
        for j in inc[last]:
            if j in used_e:
                continue
            used_e.add(j)
            for y in edges[j]:
                if y > path_v[0] and y not in path_v:
                    path_v.append(y)
                    path_e.append(j)
                    extend(path_v, path_e, used_e)
                    path_e.pop()
                    path_v.pop()
            used_e.discard(j)

    for v1 in range(1, H.n + 1):
        if len(inc[v1]) >= 2:
            extend([v1], [], set())
    return profile


def count_berge_cycles(H: Hypergraph, l: int, v: int) -> int:
    """Berge l-cycles of ``H`` whose hyperedges together span exactly ``v`` vertices."""
    return berge_cycle_profile(H, l).get(v, 0)
