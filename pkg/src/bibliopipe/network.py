"""Co-authorship graph, connected components and Fruchterman-Reingold layout."""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

import numpy as np

from . import kernels
from .ingest import Corpus

_WS_RE = re.compile(r"\s+")


def normalize_author(name: str) -> str:
    """Trim, collapse whitespace, lowercase and strip trailing periods."""
    return _WS_RE.sub(" ", name).strip().rstrip(".").strip().lower()


def record_authors(authors: Iterable[str]) -> list[str]:
    """Distinct normalized authors of one record, sorted."""
    return sorted({a for a in map(normalize_author, authors) if a})


@dataclass(frozen=True, order=True)
class CollaborationEdge:
    a: str
    b: str
    weight: int

    def __post_init__(self) -> None:
        if not self.a < self.b:
            raise ValueError(f"edge endpoints not in canonical order: {self.a!r}, {self.b!r}")
        if self.weight < 1:
            raise ValueError("edge weight must be >= 1")


@dataclass
class CoauthorGraph:
    nodes: list[str]
    edges: list[CollaborationEdge]
    components: list[tuple[frozenset[str], frozenset[str]]] = field(default_factory=list)
    total_authors: int = 0

    def weight(self, a: str, b: str) -> int:
        lo, hi = (a, b) if a < b else (b, a)
        for e in self.edges:
            if e.a == lo and e.b == hi:
                return e.weight
        return 0

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass
class Layout:
    positions: dict[str, tuple[float, float]]
    seed: int
    k_opt: float
    iterations: int


def count_pairs(corpus: Corpus | Iterable) -> Counter:
    counts: Counter = Counter()
    for rec in corpus:
        for pair in combinations(record_authors(rec.authors), 2):
            counts[pair] += 1
    return counts


def build_collaboration_graph(corpus: Corpus, min_weight: int = 4) -> CoauthorGraph:
    """Weighted co-authorship graph keeping pairs with at least ``min_weight`` joint works."""
    if min_weight < 1:
        raise ValueError("min_weight must be >= 1")
    counts = count_pairs(corpus)
    edges = sorted(CollaborationEdge(a, b, w) for (a, b), w in counts.items() if w >= min_weight)
    nodes = sorted({n for e in edges for n in (e.a, e.b)})
    all_authors = {a for rec in corpus for a in record_authors(rec.authors)}
    return CoauthorGraph(nodes=nodes, edges=edges, total_authors=len(all_authors))


def _components(nodes: list[str], edges: list[CollaborationEdge]) -> list[set[str]]:
    parent = {n: n for n in nodes}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        ra, rb = find(e.a), find(e.b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[str, set[str]] = {}
    for n in nodes:
        groups.setdefault(find(n), set()).add(n)
    return list(groups.values())


def components_with_countries(
    graph: CoauthorGraph, corpus: Corpus, attribution: str = "member"
) -> list[tuple[frozenset[str], frozenset[str]]]:
    """Connected components with the countries their works were published in.

    ``attribution="member"`` takes every record with at least one component
    author; ``"edge"`` only records containing both ends of a surviving edge.
    Components are ordered by size (descending), then by smallest node name.
    """
    if attribution not in ("member", "edge"):
        raise ValueError(f"unknown attribution {attribution!r}")
    comps = sorted(_components(graph.nodes, graph.edges), key=lambda c: (-len(c), min(c)))
    node_comp = {n: i for i, c in enumerate(comps) for n in c}
    edge_set = {(e.a, e.b) for e in graph.edges}
    countries: list[set[str]] = [set() for _ in comps]
    for rec in corpus:
        if not rec.country:
            continue
        authors = record_authors(rec.authors)
        if attribution == "member":
            hit = {node_comp[a] for a in authors if a in node_comp}
        else:
            hit = {node_comp[a] for a, b in combinations(authors, 2) if (a, b) in edge_set}
        for ci in hit:
            countries[ci].add(rec.country.lower())
    result = [(frozenset(c), frozenset(k)) for c, k in zip(comps, countries)]
    graph.components = result
    return result


def layout_fruchterman_reingold(
    graph: CoauthorGraph,
    iterations: int = 200,
    k_opt: float | None = None,
    seed: int = 0,
    area: float = 1.0,
) -> Layout:
    """Force-directed node positions.

    Repulsion ``k^2/d`` between every node pair, attraction ``d^2/k`` along
    edges, per-step displacement capped by a temperature falling linearly
    from ``0.1*sqrt(area)`` to zero. Nodes are confined to the square frame
    of the given area; start positions are uniform in it, drawn from ``seed``.
    """
    if not graph.nodes:
        raise ValueError("empty graph")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    n = len(graph.nodes)
    k = math.sqrt(area / n) if k_opt is None else float(k_opt)
    if not k > 0:
        raise ValueError("k_opt must be positive")
    index = {name: i for i, name in enumerate(graph.nodes)}
    edges = np.array([(index[e.a], index[e.b]) for e in graph.edges], dtype=np.int64).reshape(-1, 2)
    rng = np.random.default_rng(seed)
    start = rng.random((n, 2)) * math.sqrt(area)
    pos = kernels.fr_layout(start, edges, k, 0.1 * math.sqrt(area), iterations, math.sqrt(area))
    if not np.all(np.isfinite(pos)):
        raise FloatingPointError("layout produced non-finite coordinates")
    positions = {name: (float(pos[i, 0]), float(pos[i, 1])) for name, i in index.items()}
    return Layout(positions, seed, k, iterations)
