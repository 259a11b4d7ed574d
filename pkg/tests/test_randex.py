import math
import random
from fractions import Fraction
from itertools import combinations

import pytest

from berge_lab.census import count_girth, ex_girth
from berge_lab.hypercore import (
    Hypergraph,
    complete,
    count_berge_cycles,
    girth,
    girth_exceeds,
    is_linear,
    validate,
)
from berge_lab.randex import (
    HostError,
    RandomSpec,
    VertexMap,
    child_rng,
    estimate_girth_probability,
    estimate_random_ex,
    exponent_table,
    extract_girth_subgraph,
    extract_triangle_subgraph,
    extraction_experiment,
    greedy_host,
    is_local_isomorphism,
    host_size_condition,
    map_trials,
    sample,
)


# --------------------------------------------------------------------------
# sampling


def test_sample_extremes():
    assert sample(RandomSpec(6, 3, seed=1, p=0)).m == 0
    assert sample(RandomSpec(6, 3, seed=1, p=1)) == complete(6, 3)


def test_sample_deterministic():
    spec = RandomSpec(8, 3, seed=42, m=10)
    assert sample(spec) == sample(spec)
    assert sample(spec).m == 10
    assert sample(RandomSpec(8, 3, seed=43, m=10)) != sample(spec)


@pytest.mark.parametrize("kwargs", [dict(m=11), dict(p=1.5), dict(), dict(p=0.5, m=2), dict(m=-1)])
def test_spec_rejects(kwargs):
    with pytest.raises(ValueError):
        RandomSpec(5, 3, seed=0, **kwargs) if kwargs.get("m") != 11 else RandomSpec(5, 3, seed=0, m=11)


def test_binomial_edge_frequency():
    # each of the 20 triples of [6] appears with probability 0.3
    total = sum(sample(RandomSpec(6, 3, seed=0, p=0.3), child_rng(0, i)).m for i in range(2000))
    mean, sd = 20 * 0.3, math.sqrt(20 * 0.3 * 0.7 / 2000)
    assert abs(total / 2000 - mean) < 4 * sd


def test_uniform_model_is_uniform():
    # all 10 single edges of K_5^3 should come up about equally often
    counts = {}
    for i in range(5000):
        e = sample(RandomSpec(5, 3, seed=9, m=1), child_rng(9, i)).edges[0]
        counts[e] = counts.get(e, 0) + 1
    assert len(counts) == 10
    chi2 = sum((c - 500) ** 2 / 500 for c in counts.values())
    assert chi2 < 27.9  # 99.9% quantile, 9 degrees of freedom


# --------------------------------------------------------------------------
# local isomorphisms


def test_identity_is_local_isomorphism(fano):
    assert is_local_isomorphism(VertexMap.identity(7), fano, fano)


def test_collapsing_map_is_not_homomorphism(fano):
    chi = VertexMap(7, 7, (1, 1, 3, 4, 5, 6, 7))
    assert not is_local_isomorphism(chi, fano, fano)


def test_two_cycle_folded_onto_one_edge():
    F = validate([(1, 2, 3), (1, 2, 4)], 4, 3)
    F2 = validate([(1, 2, 3)], 3, 3)
    assert not is_local_isomorphism(VertexMap(4, 3, (1, 2, 3, 3)), F, F2)


def test_disjoint_edges_may_share_an_image():
    F = validate([(1, 2, 3), (4, 5, 6)], 6, 3)
    F2 = validate([(1, 2, 3)], 3, 3)
    assert is_local_isomorphism(VertexMap(6, 3, (1, 2, 3, 1, 2, 3)), F, F2)


def test_vertex_map_checks():
    with pytest.raises(ValueError):
        VertexMap(3, 3, (1, 2))
    with pytest.raises(ValueError):
        VertexMap(2, 3, (1, 4))


def _random_berge_cycle(rnd, k, r, n):
    while True:
        verts = rnd.sample(range(1, n + 1), k)
        edges = []
        for i in range(k):
            pair = {verts[i], verts[(i + 1) % k]}
            rest = rnd.sample([v for v in range(1, n + 1) if v not in pair], r - 2)
            edges.append(tuple(sorted(pair | set(rest))))
        if len(set(edges)) == k:
            return validate(edges, n, r)


def _linear_completion(rnd, edges, t, r, extra):
    used = {p for e in edges for p in combinations(e, 2)}
    out = set(edges)
    for _ in range(extra):
        e = tuple(sorted(rnd.sample(range(1, t + 1), r)))
        pairs = set(combinations(e, 2))
        if not pairs & used:
            out.add(e)
            used |= pairs
    return validate(sorted(out), t, r)


def test_local_isomorphism_preserves_short_cycles():
    # the image of a Berge cycle of length k under a local isomorphism
    # always carries a Berge cycle of length at most k
    rnd = random.Random(20240601)
    r, hits, folded = 3, 0, 0
    for _ in range(10000):
        k = rnd.randint(2, 5)
        n = k * (r - 1) + 2
        F = _random_berge_cycle(rnd, k, r, n)
        t = n + 3
        base = list(range(1, t + 1))
        rnd.shuffle(base)
        image = base[:n]
        for _ in range(rnd.randint(0, 2)):  # a few merges so the map is not injective
            a, b = rnd.sample(range(n), 2)
            image[a] = image[b]
        chi = VertexMap(n, t, tuple(image))
        imgs = [chi(e) for e in F.edges]
        if any(len(s) != r for s in imgs):
            continue
        core = sorted({tuple(sorted(s)) for s in imgs})
        if not is_linear(validate(core, t, r)):
            continue
        F2 = _linear_completion(rnd, core, t, r, extra=4)
        if is_local_isomorphism(chi, F, F2):
            hits += 1
            folded += len(set(image)) < n
            assert girth(validate(core, t, r)) <= k
    assert hits > 500 and folded > 50


# --------------------------------------------------------------------------
# extractors


def _keep_rule(H, J, chi):
    """Independent statement of the general extractor's keep rule."""
    host = set(J.edges)
    image = {e: tuple(sorted({chi[v - 1] for v in e})) for e in H.edges}
    kept = []
    for e in H.edges:
        if image[e] not in host:
            continue
        clash = any(f != e and image[f] == image[e] and set(e) & set(f) for f in H.edges)
        if not clash:
            kept.append(e)
    return kept


def test_single_edge_extraction(fano):
    H = validate([(1, 2, 3)], 3, 3)
    for seed in range(20):
        out, rep = extract_girth_subgraph(H, fano, 2, seed=seed)
        assert out.edges in ((), ((1, 2, 3),))
        assert rep.girth_ok and rep.kept == out.m


def test_identity_hook_keeps_everything(fano):
    J = greedy_host(9, 3, 3, seed=5)
    out, rep = extract_girth_subgraph(J, J, 3, chi=VertexMap.identity(9))
    assert out == J and rep.kept == J.m
    out, _ = extract_girth_subgraph(fano, fano, 2, chi=list(range(1, 8)))
    assert out == fano


def test_subgraph_of_host_is_kept_under_identity():
    J = greedy_host(10, 3, 4, seed=2)
    H = validate(J.edges[::2], 10, 3)
    out, _ = extract_girth_subgraph(H, J, 4, chi=VertexMap.identity(10))
    assert out == H


def test_extractor_rejects_bad_host(fano):
    with pytest.raises(HostError):
        extract_girth_subgraph(fano, fano, 3)
    with pytest.raises(HostError):
        extract_girth_subgraph(fano, complete(4, 2), 2)
    with pytest.raises(HostError):
        extract_triangle_subgraph(fano, fano)


def test_extractor_matches_independent_rule():
    H = complete(6, 3)
    J = greedy_host(12, 3, 3, seed=0)
    for i in range(1000):
        chi = tuple(int(x) for x in child_rng(7, i).integers(1, 13, size=6))
        out, _ = extract_girth_subgraph(H, J, 3, chi=chi)
        assert list(out.edges) == _keep_rule(H, J, chi)


def test_extractor_mean_self_consistent():
    H = complete(6, 3)
    J = greedy_host(12, 3, 3, seed=0)
    trials = 2000
    lib = [extract_girth_subgraph(H, J, 3, rng=child_rng(11, i))[1].kept / H.m for i in range(trials)]
    rnd = random.Random(99)
    ref = [len(_keep_rule(H, J, [rnd.randint(1, 12) for _ in range(6)])) / H.m for _ in range(trials)]

    def mean_se(xs):
        mu = sum(xs) / len(xs)
        var = sum((x - mu) ** 2 for x in xs) / (len(xs) - 1)
        return mu, math.sqrt(var / len(xs))

    (a, sa), (b, sb) = mean_se(lib), mean_se(ref)
    assert abs(a - b) <= 3 * math.sqrt(sa ** 2 + sb ** 2)


def test_t_condition_small_host_fails():
    assert not host_size_condition(complete(6, 3), 12)
    assert host_size_condition(Hypergraph(6, 3, ()), 3)


def _affine_host(q):
    """Linear 3-graph on three copies of Z_q with q^2 edges (q odd)."""
    edges = {tuple(sorted((a + 1, q + (a + b) % q + 1, 2 * q + (a + 2 * b) % q + 1)))
             for a in range(q) for b in range(q)}
    return Hypergraph(3 * q, 3, tuple(sorted(edges)))


def test_expected_kept_edges_when_t_condition_holds():
    q = 273
    J = _affine_host(q)
    t = J.n
    assert J.m == q * q and girth_exceeds(J, 2)
    edges = []
    for k in range(1000):
        b = 5 * k
        edges += [(b + 1, b + 2, b + 3), (b + 3, b + 4, b + 5)]
    H = Hypergraph(5000, 3, tuple(edges))
    assert host_size_condition(H, t)
    trials = 400
    kept = [extract_girth_subgraph(H, J, 2, rng=child_rng(3, i))[1].kept for i in range(trials)]
    mu = sum(kept) / trials
    se = math.sqrt(sum((x - mu) ** 2 for x in kept) / (trials - 1) / trials)
    base = J.m * t ** -3 * H.m
    assert mu + 3 * se >= base
    assert mu + 3 * se >= math.factorial(3) * base / 2


def test_triangle_extractor_examples(fano):
    J = greedy_host(9, 3, 3, seed=1)
    # every vertex onto one host vertex: no image is an edge
    out, rep = extract_triangle_subgraph(fano, J, chi=[1] * 7)
    assert out.m == 0 and rep.kept == 0
    H = validate([(1, 2, 3), (4, 5, 6)], 6, 3)
    host = validate([(1, 2, 3), (1, 4, 5)], 5, 3)
    out, rep = extract_triangle_subgraph(H, host, chi=[1, 2, 3, 1, 4, 5])
    assert out == H and rep.deleted == 0


def test_triangle_cleanup_deletes_smallest_edge():
    # both edges of a Berge 2-cycle land on the single host edge
    H = validate([(1, 2, 3), (1, 2, 4)], 4, 3)
    J = validate([(1, 2, 3)], 3, 3)
    out, rep = extract_triangle_subgraph(H, J, chi=[1, 2, 3, 3])
    assert (rep.kept, rep.deleted) == (2, 1)
    assert out.edges == ((1, 2, 4),)
    host = greedy_host(6, 3, 3, seed=0)
    out, rep = extract_triangle_subgraph(complete(6, 3), host, chi=VertexMap.identity(6))
    assert out == host and rep.deleted == 0


def test_triangle_expectation_bound():
    H = complete(6, 3)
    t, r = 12, 3
    J = greedy_host(t, r, 3, seed=0)
    trials = 1500
    vals = []
    for i in range(trials):
        _, rep = extract_triangle_subgraph(H, J, rng=child_rng(5, i))
        vals.append(rep.kept - rep.deleted)
    mu = sum(vals) / trials
    se = math.sqrt(sum((x - mu) ** 2 for x in vals) / (trials - 1) / trials)
    penalty = sum(count_berge_cycles(H, l, v) * J.m * (r / t) ** v
                  for l in (2, 3) for v in range(r, l * r + 1))
    bound = J.m * t ** -r * H.m - penalty
    assert mu + 3 * se >= bound
    assert all(v >= 0 for v in vals)


def test_triangle_extractor_pre_cleanup_mean():
    # before cleanup an edge survives iff its image is a host edge, which
    # happens with probability exactly r! e(J) / t^r
    H = complete(6, 3)
    t, r = 12, 3
    J = greedy_host(t, r, 3, seed=0)
    trials = 3000
    kept = [extract_triangle_subgraph(H, J, rng=child_rng(6, i))[1].kept for i in range(trials)]
    mu = sum(kept) / trials
    se = math.sqrt(sum((x - mu) ** 2 for x in kept) / (trials - 1) / trials)
    assert abs(mu - math.factorial(r) * J.m * H.m / t ** r) <= 3 * se


@pytest.mark.parametrize("seed", range(25))
def test_extractors_always_sound(seed):
    rng = child_rng(1234, seed)
    r = 3 + seed % 2
    n = 8 + seed % 5
    H = sample(RandomSpec(n, r, seed, p=0.5), rng)
    for l in (2, 3, 4):
        J = greedy_host(n, r, l, rng=rng)
        out, rep = extract_girth_subgraph(H, J, l, rng=rng)
        assert girth(out) > l and rep.kept <= H.m
    out, rep = extract_triangle_subgraph(H, greedy_host(n, r, 3, rng=rng), rng=rng)
    assert girth(out) > 3 and out.m == rep.kept - rep.deleted


# --------------------------------------------------------------------------
# hosts


def test_greedy_host_single_edge():
    assert greedy_host(3, 3, 4, seed=0).edges == ((1, 2, 3),)


@pytest.mark.parametrize("t, r, l", [(8, 3, 2), (9, 3, 3), (10, 3, 4), (8, 2, 4), (9, 4, 3)])
def test_greedy_host_is_maximal(t, r, l):
    J = greedy_host(t, r, l, seed=3)
    assert girth(J) > l
    for e in combinations(range(1, t + 1), r):
        if e not in J.edge_set:
            assert girth(J.add_edges([e])) <= l


def test_greedy_host_on_seven_points():
    sizes = {greedy_host(7, 3, 2, seed=s).m for s in range(200)}
    assert min(sizes) >= 5
    assert 7 in sizes


def test_greedy_host_rejects_small_t():
    with pytest.raises(ValueError):
        greedy_host(2, 3, 3)


# --------------------------------------------------------------------------
# Monte Carlo


def test_probability_trivial_cases():
    assert estimate_girth_probability(6, 3, 0, 3, 50, seed=1).estimate == 1.0
    assert estimate_girth_probability(6, 3, 1, 3, 50, seed=1).estimate == 1.0


def test_probability_near_census_ratio():
    exact = Fraction(count_girth(6, 3, 3, 2).count, math.comb(20, 3))
    res = estimate_girth_probability(6, 3, 3, 2, 20000, seed=4)
    se = math.sqrt(float(exact) * (1 - float(exact)) / 20000)
    assert abs(res.estimate - float(exact)) <= 3 * se
    assert res.fitted_a == pytest.approx(res.estimate ** (-1 / 3))


def test_map_trials_independent_of_workers():
    def_args = (6, 3, 3, 2, 17)
    from berge_lab.randex import _prob_trial

    serial = map_trials(_prob_trial, def_args, 300, workers=1)
    assert map_trials(_prob_trial, def_args, 300, workers=3) == serial


def test_random_ex_examples():
    assert estimate_random_ex(6, 3, 0.0, 2, 5, seed=0).mean == 0
    stats = estimate_random_ex(6, 3, 1.0, 2, 2, seed=0, method="exact")
    assert stats.values == [ex_girth(6, 3, 2)[0]] * 2 == [4, 4]
    stats = estimate_random_ex(9, 3, 0.4, 3, 30, seed=2)
    for row in stats.rows:
        assert row["kept"] - row["deleted"] <= row["kept"]
        assert row["girth_ok"]
    assert stats.maximum <= stats.mean_sample_edges * 30


def test_random_ex_extractor_bounded_by_sample():
    stats = estimate_random_ex(9, 3, 0.5, 4, 20, seed=3)
    for i, v in enumerate(stats.values):
        H = sample(RandomSpec(9, 3, 3, p=0.5), child_rng(3, i))
        assert 0 <= v <= H.m


def test_extraction_experiment_rows():
    rows, summary = extraction_experiment(10, 3, 3, 30, seed=5, p=0.3, t=9)
    assert len(rows) == 30 and summary["all_girth_ok"]
    assert set(rows[0]) == {"trial", "seed", "n", "r", "l", "p_or_m", "kept", "deleted", "girth_ok"}
    again, _ = extraction_experiment(10, 3, 3, 30, seed=5, p=0.3, t=9, workers=2)
    assert again == rows


# --------------------------------------------------------------------------
# exponent table


def test_exponents_triangle_case():
    T = exponent_table(3, 3)
    assert T.upper_p_exponent == Fraction(1, 3) and T.n_exponent == 2
    for r in range(2, 8):
        assert exponent_table(3, r).upper_p_exponent == Fraction(1, 2 * r - 3)


def test_exponents_girth_five_three_graphs():
    T = exponent_table(4, 3)
    assert (T.k, T.lam) == (2, 1)
    assert T.upper_p_exponent == Fraction(1, 6)
    assert T.lower_p_exponent == Fraction(1, 4)
    assert T.n_exponent == Fraction(3, 2)


def test_exponents_formula_arithmetic():
    T = exponent_table(4, 6)
    assert T.lam == 2 and T.upper_p_exponent == Fraction(1, 14)


def test_exponent_table_json_friendly():
    d = exponent_table(5, 4).as_dict()
    assert d["gamma_conjectured"] == "11/3"
    assert d["gamma_bracket"] == ["3", "4"]


@pytest.mark.parametrize("l, r", [(2, 3), (3, 1)])
def test_exponent_table_range(l, r):
    with pytest.raises(ValueError):
        exponent_table(l, r)
