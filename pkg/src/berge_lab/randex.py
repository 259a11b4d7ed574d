"""Random r-graphs, local isomorphisms and large-girth subgraph extraction.

Randomness comes from numpy's PCG64.  Trial ``i`` of a run seeded with ``s``
always draws from ``SeedSequence(s, spawn_key=(i,))``, so results do not
depend on how trials are split between worker processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Callable, Optional, Sequence

import numpy as np

from .census import DEFAULT_BUDGET, max_girth_subgraph, resolve_workers
from .hypercore import (
    GirthGuard,
    Hypergraph,
    find_berge_cycle,
    girth_exceeds,
    max_i_degree,
)

__all__ = [
    "RandomSpec",
    "VertexMap",
    "ExtractionReport",
    "HostError",
    "child_rng",
    "sample",
    "is_local_isomorphism",
    "host_size_condition",
    "extract_girth_subgraph",
    "extract_triangle_subgraph",
    "greedy_host",
    "ProbabilityEstimate",
    "estimate_girth_probability",
    "estimate_random_ex",
    "ExponentTable",
    "exponent_table",
    "map_trials",
    "extraction_experiment",
]


class HostError(ValueError):
    """The host hypergraph does not meet the extractor's girth requirement."""


def child_rng(seed: int, *keys: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=keys)))


@lru_cache(maxsize=64)
def _universe(n: int, r: int) -> tuple:
    return tuple(combinations(range(1, n + 1), r))


@dataclass(frozen=True)
class RandomSpec:
    """Binomial model when ``p`` is given, uniform model when ``m`` is given."""

    n: int
    r: int
    seed: int
    p: Optional[float] = None
    m: Optional[int] = None

    def __post_init__(self):
        if self.n < 1 or self.r < 1:
            raise ValueError("n and r must be positive")
        if (self.p is None) == (self.m is None):
            raise ValueError("give exactly one of p (binomial model) or m (uniform model)")
        if self.p is not None and not 0 <= self.p <= 1:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.m is not None and not 0 <= self.m <= math.comb(self.n, self.r):
            raise ValueError(f"m={self.m} is infeasible: there are only {math.comb(self.n, self.r)} r-sets")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def model(self) -> str:
        return "binomial" if self.p is not None else "uniform"


def sample(spec: RandomSpec, rng: Optional[np.random.Generator] = None) -> Hypergraph:
    """Draw one hypergraph; without ``rng`` the draw depends only on ``spec.seed``."""
    if rng is None:
        rng = child_rng(spec.seed)
    universe = _universe(spec.n, spec.r)
    if spec.p is not None:
        if spec.p == 0:
            return Hypergraph(spec.n, spec.r, ())
        keep = np.flatnonzero(rng.random(len(universe)) < spec.p)
    else:
        keep = np.sort(rng.choice(len(universe), size=spec.m, replace=False))
    return Hypergraph(spec.n, spec.r, tuple(universe[i] for i in keep))


# --------------------------------------------------------------------------
# local isomorphisms and extractors


@dataclass(frozen=True)
class VertexMap:
    """Total map from ``1..source_n`` to ``1..target_n``; ``image[v - 1]`` is the image of v."""

    source_n: int
    target_n: int
    image: tuple[int, ...]

    def __post_init__(self):
        if len(self.image) != self.source_n:
            raise ValueError("vertex map must assign an image to every source vertex")
        if any(not 1 <= x <= self.target_n for x in self.image):
            raise ValueError("vertex map sends a vertex outside the target")

    def __call__(self, e: Sequence[int]) -> frozenset:
        return frozenset(self.image[v - 1] for v in e)

    @classmethod
    def identity(cls, n: int) -> "VertexMap":
        return cls(n, n, tuple(range(1, n + 1)))


def is_local_isomorphism(chi: VertexMap, F: Hypergraph, F2: Hypergraph) -> bool:
    """A homomorphism ``F -> F2`` that separates intersecting hyperedges."""
    r = F.r
    targets = F2.edge_set
    images = []
    for e in F.edges:
        img = chi(e)
        if len(img) != r or tuple(sorted(img)) not in targets:
            return False
        images.append(img)
    for a, b in combinations(range(F.m), 2):
        if images[a] == images[b] and set(F.edges[a]) & set(F.edges[b]):
            return False
    return True


@dataclass
class ExtractionReport:
    input_edges: int
    kept: int
    deleted: int
    t: int
    host_edges: int
    seed: Optional[int]
    girth_ok: bool
    t_condition: bool

    def as_dict(self) -> dict:
        return asdict(self)


def host_size_condition(H: Hypergraph, t: int) -> bool:
    """``t >= r^2 4^r Delta_i^{1/(r-i)}`` for every ``1 <= i < r``."""
    r = H.r
    for i in range(1, r):
        delta = max_i_degree(H, i)
        if delta and t < r * r * 4**r * delta ** (1 / (r - i)):
            return False
    return True


def _draw_map(H: Hypergraph, t: int, seed, chi, rng) -> VertexMap:
    if chi is not None:
        if isinstance(chi, VertexMap):
            return chi
        return VertexMap(H.n, t, tuple(int(x) for x in chi))
    if rng is None:
        rng = child_rng(seed if seed is not None else 0)
    return VertexMap(H.n, t, tuple(int(x) for x in rng.integers(1, t + 1, size=H.n)))


def _check_host(H: Hypergraph, J: Hypergraph, l: int) -> None:
    if J.r != H.r:
        raise HostError(f"host uniformity {J.r} differs from {H.r}")
    if J.n < J.r:
        raise HostError("host needs at least r vertices")
    if not girth_exceeds(J, l):
        raise HostError(f"host girth must exceed {l}")


def extract_girth_subgraph(H: Hypergraph, J: Hypergraph, l: int, seed: Optional[int] = None,
                           chi=None, rng: Optional[np.random.Generator] = None):
    """Keep the hyperedges ``e`` whose image lands on a host edge and differs from
    the image of every other hyperedge meeting ``e``.

    The kept subgraph maps into ``J`` by a local isomorphism, so its girth exceeds
    ``l`` whenever the host's does.  ``chi`` overrides the random vertex map.
    """
    _check_host(H, J, l)
    t = J.n
    chi = _draw_map(H, t, seed, chi, rng)
    host = J.edge_set
    images = [chi(e) for e in H.edges]
    by_image: dict[frozenset, list[int]] = {}
    for j, img in enumerate(images):
        by_image.setdefault(img, []).append(j)
    kept = []
    for j, e in enumerate(H.edges):
        img = images[j]
        if len(img) != H.r or tuple(sorted(img)) not in host:
            continue
        es = set(e)
        if any(k != j and es.intersection(H.edges[k]) for k in by_image[img]):
            continue
        kept.append(e)
    out = Hypergraph(H.n, H.r, tuple(kept))
    ok = girth_exceeds(out, l)
    assert ok, "extracted subgraph has a short Berge cycle"
    report = ExtractionReport(H.m, out.m, 0, t, J.m, seed, ok, host_size_condition(H, t))
    return out, report


def extract_triangle_subgraph(H: Hypergraph, J: Hypergraph, seed: Optional[int] = None,
                              chi=None, rng: Optional[np.random.Generator] = None):
    """Keep hyperedges mapped onto host edges, then break every Berge 2- and 3-cycle.

    Cleanup repeatedly takes a shortest remaining cycle of length at most 3 and
    deletes its lexicographically smallest hyperedge.
    """
    _check_host(H, J, 3)
    t = J.n
    chi = _draw_map(H, t, seed, chi, rng)
    host = J.edge_set
    kept = []
    for e in H.edges:
        img = chi(e)
        if len(img) == H.r and tuple(sorted(img)) in host:
            kept.append(e)
    current = Hypergraph(H.n, H.r, tuple(kept))
    deleted = 0
    while True:
        w = find_berge_cycle(current, 3)
        if w is None:
            break
        victim = min(w.edge_tuples(current))
        current = Hypergraph(H.n, H.r, tuple(e for e in current.edges if e != victim))
        deleted += 1
    ok = girth_exceeds(current, 3)
    assert ok
    report = ExtractionReport(H.m, len(kept), deleted, t, J.m, seed, ok, host_size_condition(H, t))
    return current, report


def greedy_host(t: int, r: int, l: int, seed: int = 0,
                rng: Optional[np.random.Generator] = None) -> Hypergraph:
    """Random maximal r-graph on ``1..t`` with girth larger than ``l``.

    Scans the r-sets once in random order and keeps each one that does not
    close a short cycle; a rejected set stays rejected as edges are added, so
    the result is maximal.
    """
    if t < r:
        raise ValueError("host needs t >= r")
    if rng is None:
        rng = child_rng(seed)
    universe = _universe(t, r)
    guard = GirthGuard(t, l)
    for i in rng.permutation(len(universe)):
        e = universe[i]
        if guard.admits(e):
            guard.add(e)
    return Hypergraph(t, r, tuple(sorted(guard.edges)))


# --------------------------------------------------------------------------
# Monte Carlo


def _run_chunk(args):
    fn, fixed, start, stop = args
    return [fn(i, *fixed) for i in range(start, stop)]


def map_trials(fn: Callable, fixed: tuple, trials: int, workers: Optional[int] = None) -> list:
    """``[fn(i, *fixed) for i in range(trials)]``, possibly across processes.

    Chunks are contiguous and reassembled in order, so the result is the same
    for every worker count.
    """
    workers = resolve_workers(workers)
    if workers == 1 or trials < 2:
        return [fn(i, *fixed) for i in range(trials)]
    size = -(-trials // (workers * 4))
    chunks = [(fn, fixed, s, min(s + size, trials)) for s in range(0, trials, size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_chunk, chunks))
    return [x for part in parts for x in part]


@dataclass
class ProbabilityEstimate:
    n: int
    r: int
    m: int
    l: int
    trials: int
    seed: int
    successes: int
    estimate: float
    half_width: float
    fitted_a: Optional[float]

    def as_dict(self) -> dict:
        return asdict(self)


def _prob_trial(i, n, r, m, l, seed):
    H = sample(RandomSpec(n, r, seed, m=m), child_rng(seed, i))
    return girth_exceeds(H, l)


def estimate_girth_probability(n: int, r: int, m: int, l: int, trials: int, seed: int,
                               workers: Optional[int] = None, per_trial: bool = False):
    """Fraction of uniform m-edge r-graphs with girth larger than ``l``.

    The half-width is the 95% normal-approximation interval.  ``fitted_a`` is
    ``estimate ** (-1/m)``, the per-edge decay rate of the estimate.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    RandomSpec(n, r, seed, m=m)  # feasibility
    outcomes = map_trials(_prob_trial, (n, r, m, l, seed), trials, workers)
    k = sum(outcomes)
    est = k / trials
    half = 1.959963984540054 * math.sqrt(est * (1 - est) / trials)
    fitted = est ** (-1 / m) if m > 0 and est > 0 else None
    result = ProbabilityEstimate(n, r, m, l, trials, seed, k, est, half, fitted)
    return (result, outcomes) if per_trial else result


@dataclass
class ExStatistics:
    n: int
    r: int
    p: float
    l: int
    trials: int
    seed: int
    method: str
    t: Optional[int]
    values: list = field(repr=False)
    rows: list = field(repr=False)
    mean: float = 0.0
    stderr: float = 0.0
    maximum: int = 0
    minimum: int = 0
    mean_sample_edges: float = 0.0
    exponents: Optional[dict] = None
    reference: Optional[dict] = None

    def summary(self) -> dict:
        d = asdict(self)
        d.pop("values")
        d.pop("rows")
        return d


def default_host_size(n: int, r: int, p: float) -> int:
    return max(r, math.ceil(p ** (1 / (r - 1)) * n)) if p > 0 else r


def _ex_trial(i, n, r, p, l, seed, method, t, budget):
    rng = child_rng(seed, i)
    H = sample(RandomSpec(n, r, seed, p=p), rng)
    if method == "exact":
        value, W = max_girth_subgraph(H, l, budget)
        ok = girth_exceeds(W, l)
        return H.m, value, 0, ok
    J = greedy_host(t, r, l, rng=rng)
    if l == 3:
        out, rep = extract_triangle_subgraph(H, J, seed=seed, rng=rng)
    else:
        out, rep = extract_girth_subgraph(H, J, l, seed=seed, rng=rng)
    return H.m, rep.kept, rep.deleted, rep.girth_ok


def estimate_random_ex(n: int, r: int, p: float, l: int, trials: int, seed: int,
                       method: str = "extractor", t: Optional[int] = None,
                       workers: Optional[int] = None, budget: int = DEFAULT_BUDGET) -> ExStatistics:
    """Per-trial lower bounds on the largest girth-above-``l`` subgraph of a binomial random r-graph.

    ``method="exact"`` solves each sample by branch and bound; ``"extractor"``
    maps the sample into a greedy host on ``t`` vertices (default
    ``ceil(p^{1/(r-1)} n)``) and keeps what the extractor keeps.
    """
    if method not in ("extractor", "exact"):
        raise ValueError("method must be 'extractor' or 'exact'")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    RandomSpec(n, r, seed, p=p)
    if method == "extractor":
        t = default_host_size(n, r, p) if t is None else t
    else:
        t = None
    results = map_trials(_ex_trial, (n, r, p, l, seed, method, t, budget), trials, workers)
    values, rows = [], []
    for i, (m_sample, kept, deleted, ok) in enumerate(results):
        values.append(kept - deleted)
        rows.append({"trial": i, "seed": seed, "n": n, "r": r, "l": l, "p_or_m": p,
                     "kept": kept, "deleted": deleted, "girth_ok": ok})
    mean = sum(values) / trials
    var = sum((v - mean) ** 2 for v in values) / (trials - 1) if trials > 1 else 0.0
    stats = ExStatistics(n, r, p, l, trials, seed, method, t, values, rows,
                         mean=mean, stderr=math.sqrt(var / trials), maximum=max(values),
                         minimum=min(values),
                         mean_sample_edges=sum(x[0] for x in results) / trials)
    if l >= 3 and r >= 2:
        table = exponent_table(l, r)
        stats.exponents = table.as_dict()
        if p > 0:
            stats.reference = {
                "upper": p ** float(table.upper_p_exponent) * n ** float(table.n_exponent),
                "lower": p ** float(table.lower_p_exponent) * n ** float(table.n_exponent),
            }
    return stats


def _extract_trial(i, n, r, l, seed, p, m, t, extractor):
    rng = child_rng(seed, i)
    H = sample(RandomSpec(n, r, seed, p=p, m=m), rng)
    J = greedy_host(t, r, l, rng=rng)
    if extractor == "triangle":
        _, rep = extract_triangle_subgraph(H, J, seed=seed, rng=rng)
    else:
        _, rep = extract_girth_subgraph(H, J, l, seed=seed, rng=rng)
    return rep.input_edges, rep.kept, rep.deleted, rep.girth_ok, J.m, rep.t_condition


def extraction_experiment(n: int, r: int, l: int, trials: int, seed: int, p: Optional[float] = None,
                          m: Optional[int] = None, t: Optional[int] = None, extractor: str = "general",
                          workers: Optional[int] = None):
    """Run the extractor on independent samples, each against its own greedy host.

    Returns ``(rows, summary)``; one row per trial.
    """
    if extractor not in ("general", "triangle"):
        raise ValueError("extractor must be 'general' or 'triangle'")
    if extractor == "triangle" and l != 3:
        raise ValueError("the triangle extractor targets girth larger than 3 (use l=3)")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    RandomSpec(n, r, seed, p=p, m=m)
    if t is None:
        t = default_host_size(n, r, p) if p is not None else max(r, n)
    results = map_trials(_extract_trial, (n, r, l, seed, p, m, t, extractor), trials, workers)
    rows = []
    for i, (inp, kept, deleted, ok, _, _) in enumerate(results):
        rows.append({"trial": i, "seed": seed, "n": n, "r": r, "l": l,
                     "p_or_m": p if p is not None else m,
                     "kept": kept, "deleted": deleted, "girth_ok": ok})
    final = [row["kept"] - row["deleted"] for row in rows]
    fractions = [f / x[0] for f, x in zip(final, results) if x[0]]
    mean = sum(final) / trials
    var = sum((v - mean) ** 2 for v in final) / (trials - 1) if trials > 1 else 0.0
    summary = {
        "n": n, "r": r, "l": l, "trials": trials, "seed": seed, "p": p, "m": m, "t": t,
        "extractor": extractor,
        "mean": mean,
        "stderr": math.sqrt(var / trials),
        "mean_kept_fraction": sum(fractions) / len(fractions) if fractions else None,
        "mean_host_edges": sum(x[4] for x in results) / trials,
        "all_girth_ok": all(x[3] for x in results),
        "t_condition_trials": sum(1 for x in results if x[5]),
    }
    return rows, summary


# --------------------------------------------------------------------------
# exponents


@dataclass(frozen=True)
class ExponentTable:
    """Exponents of ``p`` and ``n`` in the dense-regime bounds ``p^a n^b``.

    Regime boundaries are stored as exponents ``x`` of ``p = n^x``.  The
    conjectured ``gamma`` is a reference value only.
    """

    l: int
    r: int
    k: int
    lam: int
    upper_p_exponent: Fraction
    lower_p_exponent: Fraction
    n_exponent: Fraction
    flat_n_exponent: Fraction
    flat_regime_start: Fraction
    upper_flat_end: Fraction
    upper_dense_start: Fraction
    lower_dense_start: Fraction
    gamma_bracket: tuple[Fraction, Fraction]
    gamma_k_bracket: tuple[Fraction, Fraction]
    gamma_conjectured: Fraction

    def as_dict(self) -> dict:
        out = {}
        for key, val in asdict(self).items():
            if isinstance(val, Fraction):
                out[key] = str(val)
            elif isinstance(val, tuple):
                out[key] = [str(x) for x in val]
            else:
                out[key] = val
        return out


def exponent_table(l: int, r: int) -> ExponentTable:
    if l < 3 or r < 2:
        raise ValueError("exponent table needs l >= 3 and r >= 2")
    F = Fraction
    k = l // 2
    lam = -(-(r - 2) // (l - 2))
    big = r - 1 + lam
    gamma = F(r - 1) + F(r - 2, l - 2)
    if l == 3:
        upper = lower = F(1, 2 * r - 3)
        n_exp = F(2)
        dense_start = F(-2 * r + 3, 2)
        return ExponentTable(l, r, k, lam, upper, lower, n_exp, F(3, 2), F(-r + 1) + F(1, 2),
                             dense_start, dense_start, dense_start,
                             (F(r - 1), F(big)), (F(r - 1) * k, F(big) * k), gamma)
    return ExponentTable(
        l, r, k, lam,
        upper_p_exponent=F(1, big * k),
        lower_p_exponent=F(1, (r - 1) * k),
        n_exponent=1 + F(1, k),
        flat_n_exponent=1 + F(1, l - 1),
        flat_regime_start=F(-r + 1) + F(1, l - 1),
        upper_flat_end=F(-big * (k - 1), 2 * k - 1),
        upper_dense_start=F(-big * (l - 1 - k), l - 1),
        lower_dense_start=F(-(r - 1) * (l - 1 - k), l - 1),
        gamma_bracket=(F(r - 1), F(big)),
        gamma_k_bracket=(F(r - 1) * k, F(big) * k),
        gamma_conjectured=gamma,
    )
