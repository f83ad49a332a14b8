import math
import random

import numpy as np
import pytest

from oracles import pair_weights_oracle

from bibliopipe.ingest import Corpus, Record
from bibliopipe.network import (
    CoauthorGraph,
    CollaborationEdge,
    build_collaboration_graph,
    components_with_countries,
    layout_fruchterman_reingold,
    normalize_author,
)


def corpus_of(author_lists, countries=None):
    countries = countries or [None] * len(author_lists)
    return Corpus([Record(f"r{i}", f"t{i}", "abs", tuple(a), c) for i, (a, c) in enumerate(zip(author_lists, countries))])


def test_normalize_author():
    assert normalize_author("  Antonios   Tsourdos. ") == "antonios tsourdos"
    assert normalize_author("J. Smith") == "j. smith"


def test_threshold_removes_everything():
    g = build_collaboration_graph(corpus_of([["a", "b"], ["a", "b"], ["b", "c"]]), min_weight=4)
    assert g.nodes == [] and g.edges == []


def test_pair_counting_synthetic():
    lists = [["x", "y"]] * 4 + [["x", "z"]] * 3 + [["Y", "x", "x."]]
    g = build_collaboration_graph(corpus_of(lists), min_weight=4)
    assert g.edges == [CollaborationEdge("x", "y", 5)]
    assert g.nodes == ["x", "y"]
    assert g.weight("y", "x") == g.weight("x", "y") == 5
    assert g.total_authors == 3


def test_single_author_records_contribute_nothing():
    g = build_collaboration_graph(corpus_of([["solo"]] * 10 + [[]]), min_weight=1)
    assert g.edges == []


def test_edge_invariants():
    with pytest.raises(ValueError):
        CollaborationEdge("b", "a", 1)
    with pytest.raises(ValueError):
        CollaborationEdge("a", "b", 0)
    with pytest.raises(ValueError):
        build_collaboration_graph(corpus_of([]), min_weight=0)


@pytest.mark.parametrize("seed", range(10))
def test_weights_match_brute_force(seed):
    rng = random.Random(seed)
    pool = [f"author {i}" for i in range(12)] + ["Author 1.", " author  2 "]
    lists = [rng.sample(pool, rng.randint(0, 5)) for _ in range(rng.randint(1, 200))]
    oracle = pair_weights_oracle(lists)
    g = build_collaboration_graph(corpus_of(lists), min_weight=1)
    assert {(e.a, e.b): e.weight for e in g.edges} == oracle
    g4 = build_collaboration_graph(corpus_of(lists), min_weight=4)
    assert {(e.a, e.b) for e in g4.edges} == {k for k, w in oracle.items() if w >= 4}


def test_two_disjoint_edges():
    g = build_collaboration_graph(corpus_of([["a", "b"], ["c", "d"]]), min_weight=1)
    comps = components_with_countries(g, corpus_of([["a", "b"], ["c", "d"]]))
    assert [len(n) for n, _ in comps] == [2, 2]
    assert comps[0][0] == {"a", "b"}


def test_countries_of_member_records():
    lists = [["x", "y"], ["x", "q"], ["y"]]
    corpus = corpus_of(lists, ["Germany", "Germany", None])
    g = build_collaboration_graph(corpus, min_weight=1)
    g = CoauthorGraph(["x", "y"], [CollaborationEdge("x", "y", 1)])
    comps = components_with_countries(g, corpus)
    assert comps == [(frozenset({"x", "y"}), frozenset({"germany"}))]


def test_edge_attribution_flag():
    lists = [["x", "y"], ["x", "q"]]
    corpus = corpus_of(lists, ["Austria", "Netherlands"])
    g = CoauthorGraph(["x", "y"], [CollaborationEdge("x", "y", 1)])
    assert components_with_countries(g, corpus, "member")[0][1] == {"austria", "netherlands"}
    assert components_with_countries(g, corpus, "edge")[0][1] == {"austria"}
    with pytest.raises(ValueError):
        components_with_countries(g, corpus, "both")


def test_triangle_plus_pendant_is_one_component():
    lists = [["a", "b"], ["b", "c"], ["a", "c"], ["c", "d"]]
    g = build_collaboration_graph(corpus_of(lists), min_weight=1)
    comps = components_with_countries(g, corpus_of(lists))
    assert len(comps) == 1 and comps[0][0] == {"a", "b", "c", "d"}


def test_components_partition_nodes_and_order():
    rng = random.Random(3)
    pool = [f"n{i}" for i in range(30)]
    lists = [rng.sample(pool, 2) for _ in range(40)]
    corpus = corpus_of(lists)
    g = build_collaboration_graph(corpus, min_weight=1)
    comps = components_with_countries(g, corpus)
    allnodes = [n for c, _ in comps for n in c]
    assert sorted(allnodes) == g.nodes and len(allnodes) == len(set(allnodes))
    keys = [(-len(c), min(c)) for c, _ in comps]
    assert keys == sorted(keys)
    # every edge stays inside one component
    where = {n: i for i, (c, _) in enumerate(comps) for n in c}
    assert all(where[e.a] == where[e.b] for e in g.edges)


def test_layout_empty_graph():
    with pytest.raises(ValueError, match="empty graph"):
        layout_fruchterman_reingold(CoauthorGraph([], []), seed=0)


def test_single_edge_settles_near_k(kernel_backend):
    g = CoauthorGraph(["a", "b"], [CollaborationEdge("a", "b", 4)])
    for seed in range(5):
        lay = layout_fruchterman_reingold(g, seed=seed)
        (xa, ya), (xb, yb) = lay.positions["a"], lay.positions["b"]
        d = math.hypot(xa - xb, ya - yb)
        assert 0.5 * lay.k_opt <= d <= 2 * lay.k_opt
        assert lay.k_opt == pytest.approx(math.sqrt(0.5))


def test_layout_deterministic(kernel_backend):
    g = build_collaboration_graph(corpus_of([["a", "b", "c"], ["c", "d"], ["d", "e", "a"]]), min_weight=1)
    one = layout_fruchterman_reingold(g, seed=11, iterations=50)
    two = layout_fruchterman_reingold(g, seed=11, iterations=50)
    assert one.positions == two.positions
    assert all(math.isfinite(v) for p in one.positions.values() for v in p)
    other = layout_fruchterman_reingold(g, seed=12, iterations=50)
    assert other.positions != one.positions


def test_layout_backends_bit_identical():
    from bibliopipe import kernels

    try:
        compiled = kernels.backend("compiled")
    except ImportError:
        pytest.skip("compiled kernels not built")
    rng = np.random.default_rng(0)
    pos = rng.random((15, 2))
    edges = np.array([(i, (i * 7 + 3) % 15) for i in range(15) if i != (i * 7 + 3) % 15])
    a = compiled.fr_layout(pos, edges, 0.25, 0.1, 120)
    b = kernels.backend("python").fr_layout(pos, edges, 0.25, 0.1, 120)
    assert np.array_equal(a, b)


def two_cliques():
    lists = []
    for base in ("a", "b"):
        names = [f"{base}{i}" for i in range(5)]
        lists += [[x, y] for i, x in enumerate(names) for y in names[i + 1:]]
    lists.append(["a0", "b0"])
    return build_collaboration_graph(corpus_of(lists), min_weight=1)


def clique_separation(layout):
    pos = {n: np.array(p) for n, p in layout.positions.items()}
    intra, inter = [], []
    names = sorted(pos)
    for i, x in enumerate(names):
        for y in names[i + 1:]:
            d = np.linalg.norm(pos[x] - pos[y])
            (intra if x[0] == y[0] else inter).append(d)
    return np.mean(intra), np.mean(inter)


def test_two_cliques_separate():
    g = two_cliques()
    wins = sum(1 for seed in range(10) if np.subtract(*clique_separation(layout_fruchterman_reingold(g, seed=seed))) < 0)
    assert wins >= 9


def test_custom_k_opt():
    g = CoauthorGraph(["a", "b"], [CollaborationEdge("a", "b", 4)])
    lay = layout_fruchterman_reingold(g, k_opt=0.2, seed=1)
    d = math.dist(lay.positions["a"], lay.positions["b"])
    assert lay.k_opt == 0.2 and 0.1 <= d <= 0.4
    with pytest.raises(ValueError):
        layout_fruchterman_reingold(g, k_opt=-1.0)
    with pytest.raises(ValueError):
        layout_fruchterman_reingold(g, iterations=0)
