"""Injective encodings of large-girth hypergraphs by tuples of lower-uniformity graphs.

Book encoding: every hyperedge ``e = {v_1 < ... < v_r}`` is replaced by a copy
of a fixed book graph on ``r`` labelled vertices; the ``i``-th component graph
collects the image of the book's ``i``-th edge.  When ``H`` has girth larger
than ``l`` and every page of the book has at most ``l`` edges, the books of the
union graph are exactly the hyperedges of ``H``, which is what makes the
encoding decodable.

Shadow encoding: the ``r`` maps that delete the ``i``-th smallest vertex of
each hyperedge, together with the edge set itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .hypercore import (
    Edge,
    Hypergraph,
    HypergraphError,
    Shadow,
    girth,
    shadow,
    validate,
)

__all__ = [
    "BookGraph",
    "EncodedTuple",
    "ShadowRecord",
    "EncodingError",
    "NotInImageError",
    "lambda_param",
    "build_book",
    "phi_book",
    "encode_book",
    "find_books",
    "decode_book",
    "core_sets",
    "encode_shadow",
    "decode_shadow",
    "clique_candidates",
]


class EncodingError(ValueError):
    """The input violates an encoder precondition."""


class NotInImageError(EncodingError):
    """The tuple is not the encoding of any admissible hypergraph."""


def _check_params(r: int, l: int) -> None:
    if r < 3 or l < 3:
        raise EncodingError(f"book encoding needs r >= 3 and l >= 3, got r={r}, l={l}")


def lambda_param(r: int, l: int) -> int:
    """Number of extra book edges beyond a spanning tree: ceil((r-2)/(l-2))."""
    _check_params(r, l)
    return -(-(r - 2) // (l - 2))


@dataclass(frozen=True)
class BookGraph:
    r: int
    l: int
    spine: tuple[int, int]
    pages: tuple[tuple[int, ...], ...]
    edge_order: tuple[tuple[int, int], ...]

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(range(1, self.r + 1))

    def page_edges(self, page: Sequence[int]) -> set[tuple[int, int]]:
        k = len(page)
        return {tuple(sorted((page[i], page[(i + 1) % k]))) for i in range(k)}

    def check(self) -> None:
        """Assert the structural invariants of a book."""
        lam = lambda_param(self.r, self.l)
        edges = set(self.edge_order)
        assert len(self.edge_order) == len(edges) == self.r - 1 + lam
        assert self.edge_order[0] == self.spine
        union = set()
        page_sets = [self.page_edges(p) for p in self.pages]
        for i, a in enumerate(page_sets):
            assert 3 <= len(a) <= self.l
            assert self.spine in a
            for b in page_sets[i + 1:]:
                assert a & b == {self.spine}
            union |= a
        assert union == edges
        assert {v for e in edges for v in e} == set(self.labels)


def build_book(r: int, l: int) -> BookGraph:
    """The canonical book on labels ``1..r`` with ``r - 1 + lambda`` edges.

    Spine ``{1, 2}``; ``lambda - 1`` pages are l-cycles and the last page is a
    cycle of length ``r - (lambda - 1)(l - 2)``.  Each page runs
    ``1, 2, a_1, ..., a_k`` and consumes fresh labels in increasing order.
    The edge order is the spine followed by each page's edges in path order.
    """
    lam = lambda_param(r, l)
    lengths = [l] * (lam - 1) + [r - (lam - 1) * (l - 2)]
    spine = (1, 2)
    pages = []
    order = [spine]
    nxt = 3
    for length in lengths:
        inner = list(range(nxt, nxt + length - 2))
        nxt += length - 2
        page = (1, 2, *inner)
        pages.append(page)
        walk = [2, *inner, 1]
        order.extend(tuple(sorted(p)) for p in zip(walk, walk[1:]))
    book = BookGraph(r, l, spine, tuple(pages), tuple(order))
    book.check()
    return book


# --------------------------------------------------------------------------
# book encoding


@dataclass(frozen=True)
class EncodedTuple:
    r: int
    l: int
    n: int
    graphs: tuple[Hypergraph, ...]

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "l": self.l,
            "n": self.n,
            "graphs": [[list(e) for e in G.edges] for G in self.graphs],
        }

    @classmethod
    def from_json(cls, obj) -> "EncodedTuple":
        try:
            r, l, n = obj["r"], obj["l"], obj["n"]
            raw = obj["graphs"]
        except (KeyError, TypeError) as exc:
            raise HypergraphError("encoded tuple JSON needs keys r, l, n, graphs") from exc
        if not isinstance(raw, list):
            raise HypergraphError("'graphs' must be a list")
        return cls(r, l, n, tuple(validate(g, n, 2) for g in raw))


def phi_book(H: Hypergraph, i: int, l: int) -> Hypergraph:
    """The graph of images of the book's ``i``-th edge (1-based) over all hyperedges."""
    book = build_book(H.r, l)
    if not 1 <= i <= len(book.edge_order):
        raise EncodingError(f"edge index {i} outside 1..{len(book.edge_order)}")
    a, b = book.edge_order[i - 1]
    return Hypergraph(H.n, 2, tuple(sorted({(e[a - 1], e[b - 1]) for e in H.edges})))


def encode_book(H: Hypergraph, l: int) -> EncodedTuple:
    _check_params(H.r, l)
    if girth(H) <= l:
        raise EncodingError(f"input girth {girth(H)} is not larger than l={l}")
    book = build_book(H.r, l)
    graphs = []
    for i in range(1, len(book.edge_order) + 1):
        G = phi_book(H, i, l)
        assert G.m == H.m, "component lost an edge"
        assert girth(G) > l, "component has a short cycle"
        graphs.append(G)
    return EncodedTuple(H.r, l, H.n, tuple(graphs))


def _paths(adj, start, goal, max_edges):
    """Simple paths from ``start`` to ``goal`` with 2..max_edges edges.

    Paths of two or more edges never use the edge ``start``-``goal`` itself.
    """
    out = []
    path = [start]

    def walk(x):
        for y in adj[x]:
            if y == goal:
                if len(path) >= 2:
                    out.append(tuple(path) + (goal,))
            elif y not in path and len(path) < max_edges:
                path.append(y)
                walk(y)
                path.pop()

    walk(start)
    return out


def find_books(G: Hypergraph, r: int, l: int) -> list[Edge]:
    """Vertex sets of all r-vertex books in ``G`` whose pages have at most ``l`` edges.

    For each spine ``xy`` the candidate pages are the simple ``y``-``x`` paths of
    length ``2..l-1`` avoiding ``xy``.  A book whose pages cannot be dropped
    without shrinking its vertex set has every page contributing a vertex no
    other page covers, so it is enough to combine pages (in index order) that
    each add a new vertex, pruning once more than ``r`` vertices are used.
    """
    if G.r != 2:
        raise EncodingError("find_books expects a 2-graph")
    if r < 3 or l < 3:
        return []
    adj: dict[int, list[int]] = {}
    for a, b in G.edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    for v in adj:
        adj[v].sort()

    found: set[Edge] = set()
    for x, y in G.edges:
        pages = []
        for p in _paths(adj, y, x, l - 1):
            edges = frozenset(tuple(sorted(e)) for e in zip(p, p[1:]))
            pages.append((frozenset(p), edges))

        def grow(start, verts, used):
            if len(verts) == r:
                found.add(tuple(sorted(verts)))
            for k in range(start, len(pages)):
                pv, pe = pages[k]
                if pv <= verts or pe & used:
                    continue
                new = verts | pv
                if len(new) > r:
                    continue
                grow(k + 1, new, used | pe)

        for k, (pv, pe) in enumerate(pages):
            if len(pv) <= r:
                grow(k + 1, pv, pe)
    return sorted(found)


def decode_book(T: EncodedTuple, n: int | None = None, r: int | None = None, l: int | None = None) -> Hypergraph:
    """Recover the unique hypergraph whose book encoding is ``T``.

    The candidate edge set is read off the books of the union graph and then
    re-encoded; any mismatch means ``T`` is outside the encoder's image.
    """
    n = T.n if n is None else n
    r = T.r if r is None else r
    l = T.l if l is None else l
    _check_params(r, l)
    expected = r - 1 + lambda_param(r, l)
    if len(T.graphs) != expected:
        raise NotInImageError(f"expected {expected} component graphs, got {len(T.graphs)}")
    sizes = {G.m for G in T.graphs}
    if len(sizes) > 1:
        raise NotInImageError(f"component graphs have unequal edge counts {sorted(sizes)}")
    if any(G.n != n or G.r != 2 for G in T.graphs):
        raise NotInImageError("component graphs must be 2-graphs on the stated vertex set")
    union = Hypergraph(n, 2, tuple(sorted({e for G in T.graphs for e in G.edges})))
    H = Hypergraph(n, r, tuple(find_books(union, r, l)))
    try:
        again = encode_book(H, l)
    except EncodingError as exc:
        raise NotInImageError(f"tuple not in image: recovered hypergraph is invalid ({exc})") from exc
    if again.graphs != tuple(T.graphs):
        raise NotInImageError("tuple not in image: re-encoding the recovered hypergraph differs")
    return H


# --------------------------------------------------------------------------
# shadow encoding and core sets


@dataclass(frozen=True)
class ShadowRecord:
    n: int
    r: int
    layers: tuple[tuple[Edge, ...], ...]
    edge_set: tuple[Edge, ...]

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "n": self.n,
            "layers": [[list(s) for s in layer] for layer in self.layers],
            "edge_set": [list(e) for e in self.edge_set],
        }

    @classmethod
    def from_json(cls, obj) -> "ShadowRecord":
        try:
            r, n = obj["r"], obj["n"]
            layers = tuple(tuple(sorted(tuple(sorted(s)) for s in layer)) for layer in obj["layers"])
            edges = validate(obj["edge_set"], n, r).edges
        except (KeyError, TypeError) as exc:
            raise HypergraphError("shadow record JSON needs keys r, n, layers, edge_set") from exc
        return cls(n, r, layers, edges)


def encode_shadow(H: Hypergraph) -> ShadowRecord:
    layers = []
    for i in range(H.r):
        layers.append(tuple(sorted({e[:i] + e[i + 1:] for e in H.edges})))
    if H.r >= 2:
        union = set().union(*layers)
        assert union == set(shadow(H, H.r - 1).sets)
    return ShadowRecord(H.n, H.r, tuple(layers), H.edges)


def decode_shadow(rec: ShadowRecord) -> Hypergraph:
    H = validate(rec.edge_set, rec.n, rec.r)
    if encode_shadow(H).layers != rec.layers:
        raise NotInImageError("tuple not in image: layers disagree with the recorded edge set")
    return H


def _has_distinct_representatives(options: list[list[int]]) -> bool:
    """Whether one can pick pairwise distinct items, one from each list."""
    match: dict[int, int] = {}

    def augment(i, seen):
        for j in options[i]:
            if j in seen:
                continue
            seen.add(j)
            if j not in match or augment(match[j], seen):
                match[j] = i
                return True
        return False

    return all(augment(i, set()) for i in range(len(options)))


def core_sets(H: Hypergraph) -> list[Edge]:
    """r-sets ``S`` with distinct hyperedges ``e_1..e_r`` such that ``S - {v_i}`` lies in ``e_i``."""
    r = H.r
    if H.m < r:
        return []
    containing: dict[Edge, list[int]] = {}
    for j, e in enumerate(H.edges):
        for s in combinations(e, r - 1):
            containing.setdefault(s, []).append(j)
    vertices = sorted(H.covered_vertices())
    candidates = set()
    for s in containing:
        for v in vertices:
            if v not in s:
                candidates.add(tuple(sorted(s + (v,))))
    out = []
    for S in sorted(candidates):
        options = []
        for i in range(r):
            options.append(containing.get(S[:i] + S[i + 1:], []))
            if not options[-1]:
                break
        else:
            if _has_distinct_representatives(options):
                out.append(S)
    return out


def clique_candidates(S: Shadow) -> list[Edge]:
    """(k+1)-sets all of whose k-subsets belong to the k-graph ``S``."""
    members = set(S.sets)
    if not members:
        return []
    vertices = sorted({v for s in members for v in s})
    out = set()
    for s in members:
        for v in vertices:
            if v > s[-1]:
                cand = s + (v,)
                if all(cand[:i] + cand[i + 1:] in members for i in range(len(cand))):
                    out.add(cand)
    return sorted(out)
