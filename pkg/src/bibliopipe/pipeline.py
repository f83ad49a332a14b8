"""End-to-end orchestration: stages, CSV/SVG artifacts and the run manifest."""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import kernels
from .cluster import (
    DbscanParams,
    ClusterResult,
    cluster_top_terms,
    dbscan,
    elbow_select,
    kmeans,
    pca_project,
    select_eps,
)
from .embedding import EmbeddingMatrix, EmbeddingSource, embed_mean, import_embeddings, load_word_vectors
from .ingest import Corpus, ingest, load_column_map
from .network import Layout, build_collaboration_graph, components_with_countries, layout_fruchterman_reingold
from .report import HeatmapTable, country_year_counts
from .svg import render_heatmap_svg, render_network_svg, render_scatter_svg
from .text import RuleAnnotator, TermRules, annotate_corpus, extract_content_lemmas, load_annotations
from .tfidf import TermDocMatrix, group_mean, tfidf_matrix, top_terms

log = logging.getLogger(__name__)

MANIFEST = "manifest.json"
STAGES = ("network", "heatmaps", "cluster")


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException | str):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage


@dataclass
class RunConfig:
    input: str = ""
    output_dir: str = "out"
    column_map: str | None = None
    rules: str | None = None
    annotations: str | None = None
    word_vectors: str | None = None
    embeddings: str | None = None
    # thresholds
    min_weight: int = 4
    prefix_len: int = 40
    dedup_fields: str = "title+abstract"
    min_year: int = 2003
    coverage: float = 0.95
    country_filter: str = "volume"
    top_terms: int = 25
    legend_terms: int = 5
    author_sep: str = ","
    country_attribution: str = "member"
    # layout
    seed_layout: int = 0
    layout_iterations: int = 200
    k_opt: float | None = None
    # embeddings and clustering
    embedding_source: str = "auto"
    mean_over: str = "lemmas"
    cluster_backend: str = "kmeans"
    metric: str = "euclidean"
    min_pts: int = 4
    seed_kmeans: int = 0
    kmeans_restarts: int = 10
    k_min: int = 1
    k_max: int = 10
    n_clusters: int | None = None
    projection: str = "pca"

    def validate(self) -> None:
        if not 0 < self.coverage <= 1:
            raise ValueError("coverage must be in (0, 1]")
        for name in ("min_weight", "prefix_len", "top_terms", "legend_terms", "layout_iterations",
                     "min_pts", "kmeans_restarts", "k_min", "k_max"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.n_clusters is not None and self.n_clusters < 1:
            raise ValueError("n_clusters must be positive")
        choices = {
            "embedding_source": ("auto", "word-vectors", "import", "tfidf"),
            "mean_over": ("lemmas", "tokens"),
            "cluster_backend": ("kmeans", "dbscan", "auto"),
            "metric": ("euclidean", "cosine"),
            "country_filter": ("volume", "tail-countries"),
            "country_attribution": ("member", "edge"),
            "projection": ("pca",),
        }
        for name, allowed in choices.items():
            if getattr(self, name) not in allowed:
                raise ValueError(f"{name} must be one of {allowed}")
        if any(f not in ("title", "abstract") for f in self.dedup_fields.split("+")):
            raise ValueError("dedup_fields must be title, abstract or title+abstract")

    @classmethod
    def from_mapping(cls, data: dict[str, Any]) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        clean = {k.replace("-", "_"): v for k, v in data.items()}
        unknown = sorted(set(clean) - names)
        if unknown:
            raise ValueError(f"unknown config keys: {unknown}")
        return cls(**clean)

    def effective(self) -> dict[str, Any]:
        """Every setting except the output directory, for the manifest."""
        d = dataclasses.asdict(self)
        d.pop("output_dir")
        return d


def input_paths(config: RunConfig) -> dict[str, str]:
    names = ("input", "column_map", "rules", "annotations", "word_vectors", "embeddings")
    return {n: getattr(config, n) for n in names if getattr(config, n)}


def check_inputs(config: RunConfig) -> None:
    if not config.input:
        raise StageError("config", "no input export given")
    for name, path in input_paths(config).items():
        if not Path(path).is_file():
            raise StageError("config", f"{name} path does not exist: {path}")
    src = config.embedding_source
    if src == "word-vectors" and not config.word_vectors:
        raise StageError("config", "embedding_source word-vectors needs word_vectors")
    if src == "import" and not config.embeddings:
        raise StageError("config", "embedding_source import needs embeddings")


# ---------------------------------------------------------------- CSV helpers

def _fmt(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_bytes(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> bytes:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue().encode("utf-8")


def heatmap_csv(table: HeatmapTable, corner: str, fmt: str = "{:.9g}") -> bytes:
    rows = ([label, *(fmt.format(v) for v in row)] for label, row in zip(table.row_labels, table.values))
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow([corner, *table.col_labels])
    w.writerows(rows)
    return buf.getvalue().encode("utf-8")


def write_atomic(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix="." + path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


# ---------------------------------------------------------------- stages

@dataclass
class RunState:
    config: RunConfig
    corpus: Corpus | None = None
    rules: TermRules | None = None
    lemmas: list[tuple[str, list[str]]] | None = None
    tokens: list[tuple[str, list[str]]] | None = None
    matrix: TermDocMatrix | None = None
    country_table: HeatmapTable | None = None
    artifacts: dict[str, bytes] = field(default_factory=dict)
    report: dict[str, Any] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


def _read(path: str) -> bytes:
    return Path(path).read_bytes()


def stage_ingest(state: RunState) -> Corpus:
    cfg = state.config
    column_map = load_column_map(_read(cfg.column_map).decode("utf-8") if cfg.column_map else None)
    corpus = ingest(
        _read(cfg.input),
        column_map,
        prefix_len=cfg.prefix_len,
        dedup_fields=tuple(cfg.dedup_fields.split("+")),
        min_year=cfg.min_year,
        author_sep=cfg.author_sep,
    )
    if not len(corpus):
        raise ValueError("no records survive ingest")
    state.corpus = corpus
    state.report["ingest"] = corpus.provenance.to_dict()
    state.report["ingest"]["records_with_country_in_export"] = corpus.countries_in_export
    state.report["ingest"]["records_with_country_after_filter"] = sum(1 for r in corpus if r.country)
    return corpus


def stage_network(state: RunState) -> None:
    cfg, corpus = state.config, state.corpus
    graph = build_collaboration_graph(corpus, cfg.min_weight)
    comps = components_with_countries(graph, corpus, cfg.country_attribution)
    node_comp = {n: i for i, (nodes, _) in enumerate(comps) for n in nodes}
    state.artifacts["edges.csv"] = csv_bytes(
        ["author_a", "author_b", "weight"], ((e.a, e.b, e.weight) for e in graph.edges)
    )
    if graph.nodes:
        layout = layout_fruchterman_reingold(graph, cfg.layout_iterations, cfg.k_opt, cfg.seed_layout)
        rows = ((n, *layout.positions[n], node_comp[n]) for n in graph.nodes)
        k_opt = layout.k_opt
    else:
        state.warnings.append(f"network: no author pair reaches min_weight={cfg.min_weight}")
        layout, rows, k_opt = Layout({}, cfg.seed_layout, 0.0, cfg.layout_iterations), (), None
    state.artifacts["layout.csv"] = csv_bytes(["author", "x", "y", "component_id"], rows)
    state.artifacts["fig1_author_network.svg"] = render_network_svg(layout, graph)
    state.report["network"] = {
        "authors_total": graph.total_authors,
        "nodes": len(graph.nodes),
        "edges": len(graph.edges),
        "k_opt": k_opt,
        "components": [
            {"id": i, "size": len(nodes), "authors": sorted(nodes), "countries": sorted(countries)}
            for i, (nodes, countries) in enumerate(comps)
        ],
    }


def _text(state: RunState) -> None:
    if state.lemmas is not None:
        return
    cfg, corpus = state.config, state.corpus
    state.rules = TermRules.from_json(_read(cfg.rules).decode("utf-8")) if cfg.rules else TermRules.default()
    imported = None
    if cfg.annotations:
        imported = load_annotations(_read(cfg.annotations).decode("utf-8").splitlines())
    stats: dict[str, int] = {}
    docs = annotate_corpus(corpus, RuleAnnotator(), imported, stats)
    if stats.get("annotation_failures"):
        state.warnings.append(f"text: {stats['annotation_failures']} tokens failed annotation")
    state.lemmas = [(d.doc_id, extract_content_lemmas(d, state.rules)) for d in docs]
    state.tokens = [(d.doc_id, [t.surface.lower() for t in d.tokens]) for d in docs]
    state.matrix = tfidf_matrix(state.lemmas)
    empty = sum(1 for _, l in state.lemmas if not l)
    if empty:
        state.warnings.append(f"text: {empty} documents have no content lemmas")
    state.report["text"] = {
        "documents": len(state.lemmas),
        "vocabulary": len(state.matrix.vocab),
        "annotated_by_import": sum(1 for r in corpus if imported and r.id in imported),
        "rules": state.rules.to_dict(),
    }


def stage_heatmaps(state: RunState) -> None:
    cfg, corpus = state.config, state.corpus
    table = country_year_counts(corpus.records, cfg.coverage, cfg.country_filter)
    state.country_table = table
    state.artifacts["country_year.csv"] = heatmap_csv(table, "country", "{:.0f}")
    state.artifacts["fig2_country_year.svg"] = render_heatmap_svg(table)

    _text(state)
    retained = set(table.row_labels)
    assignment = {r.id: r.country for r in corpus if r.country in retained}
    grouped = group_mean(state.matrix, assignment)
    exclude = set(state.rules.stop_terms) | set(state.rules.synonym_map)
    terms = top_terms(grouped, cfg.top_terms, exclude)
    col = {t: i for i, t in enumerate(grouped.terms)}
    term_table = HeatmapTable(
        terms,
        grouped.groups,
        np.array([[grouped.values[g, col[t]] for g in range(len(grouped.groups))] for t in terms]).reshape(
            len(terms), len(grouped.groups)
        ),
        "Most important terms per country",
    )
    state.artifacts["tfidf.csv"] = csv_bytes(["doc_id", "term", "value"], state.matrix.triplets())
    grouped_table = HeatmapTable(grouped.groups, list(grouped.terms), grouped.values)
    state.artifacts["term_country.csv"] = heatmap_csv(grouped_table, "group")
    state.artifacts["fig3_term_country.svg"] = render_heatmap_svg(term_table)
    state.report["heatmaps"] = {
        "retained_countries": table.row_labels,
        "retained_country_records": int(table.values.sum()),
        "years": table.col_labels,
        "top_terms": terms,
        "group_sizes": dict(zip(grouped.groups, grouped.sizes)),
    }


def _embeddings(state: RunState) -> EmbeddingMatrix:
    cfg, corpus = state.config, state.corpus
    src = cfg.embedding_source
    if src == "auto":
        src = "import" if cfg.embeddings else "word-vectors" if cfg.word_vectors else "tfidf"
    if src == "import":
        emb = import_embeddings(_read(cfg.embeddings), corpus)
    elif src == "word-vectors":
        table = load_word_vectors(_read(cfg.word_vectors))
        state.warnings.extend(f"word vectors: {w}" for w in table.warnings)
        docs = state.lemmas if cfg.mean_over == "lemmas" else state.tokens
        emb = embed_mean(docs, table)
    else:
        emb = EmbeddingMatrix(list(state.matrix.rows), state.matrix.values.toarray(), EmbeddingSource.TFIDF)
    state.warnings.extend(f"embedding: {w}" for w in emb.warnings)
    return emb


def cluster_embeddings(emb: EmbeddingMatrix, cfg: RunConfig) -> tuple[ClusterResult, dict[str, Any], Any]:
    """DBSCAN attempt with knee-selected eps, then KMeans at the elbow k (or DBSCAN per backend)."""
    if len(emb) < 3:
        raise ValueError(f"need at least 3 embedded documents, got {len(emb)}")
    info: dict[str, Any] = {}
    min_pts = min(cfg.min_pts, len(emb) - 1)
    eps, _ = select_eps(emb, min_pts, cfg.metric)
    db = dbscan(emb, DbscanParams(eps, min_pts), cfg.metric)
    info["dbscan"] = {"eps": eps, "min_pts": min_pts, "clusters": db.k, "noise": db.n_noise}
    k_max = min(cfg.k_max, len(emb))
    k_min = min(cfg.k_min, max(1, k_max - 2))
    k_elbow, curve = elbow_select(emb, k_min, k_max, cfg.seed_kmeans, cfg.kmeans_restarts)
    k = cfg.n_clusters or k_elbow
    km = kmeans(emb, k, seed=cfg.seed_kmeans, restarts=cfg.kmeans_restarts)
    info["kmeans"] = {"k": k, "k_elbow": k_elbow, "inertia": km.inertia}
    use_db = cfg.cluster_backend == "dbscan" or (cfg.cluster_backend == "auto" and db.k >= 2)
    info["final"] = "dbscan" if use_db else "kmeans"
    return (db if use_db else km), info, curve


def stage_cluster(state: RunState) -> None:
    cfg = state.config
    _text(state)
    emb = _embeddings(state)
    result, info, curve = cluster_embeddings(emb, cfg)
    proj = pca_project(emb, 2)
    exclude = set(state.rules.stop_terms) | set(state.rules.synonym_map)
    legends = cluster_top_terms(result, state.matrix, cfg.legend_terms, exclude, state.warnings)
    labels = result.label_map
    state.artifacts["clusters.csv"] = csv_bytes(["doc_id", "label"], ((d, labels[d]) for d in result.ids))
    state.artifacts["elbow.csv"] = csv_bytes(["k", "inertia"], zip(curve.ks, curve.inertias))
    state.artifacts["projection.csv"] = csv_bytes(
        ["doc_id", "x", "y", "label"], ((d, c[0], c[1], labels[d]) for d, c in zip(proj.ids, proj.coords))
    )
    state.artifacts["fig4_cluster_scatter.svg"] = render_scatter_svg(proj, result, legends)
    info.update(
        embedding={"source": emb.source.value, "documents": len(emb), "dim": emb.dim},
        elbow={"ks": curve.ks, "inertias": curve.inertias},
        pca_explained_variance=list(proj.explained_variance),
        legends={str(c): terms for c, terms in legends.items()},
        cluster_sizes={str(c): int(np.sum(result.labels == c)) for c in sorted(set(result.labels.tolist()))},
    )
    state.report["cluster"] = info


STAGE_FUNCS = {"network": stage_network, "heatmaps": stage_heatmaps, "cluster": stage_cluster}


def run_pipeline(config: RunConfig, stages: Sequence[str] = STAGES) -> dict[str, Any]:
    """Run the selected stages and write their artifacts plus ``manifest.json``.

    Everything is computed before the first file is written, so a fatal
    error leaves the output directory untouched. Raises :class:`StageError`.
    """
    try:
        config.validate()
    except ValueError as exc:
        raise StageError("config", exc) from exc
    check_inputs(config)
    state = RunState(config)
    for name, func in [("ingest", stage_ingest)] + [(s, STAGE_FUNCS[s]) for s in stages]:
        try:
            func(state)
        except StageError:
            raise
        except Exception as exc:
            raise StageError(name, exc) from exc

    manifest = {
        "artifacts": {name: sha256(data) for name, data in sorted(state.artifacts.items())},
        "config": config.effective(),
        "inputs": {n: {"path": p, "sha256": sha256(_read(p))} for n, p in input_paths(config).items()},
        "kernel_backend": kernels.BACKEND,
        "stages": ["ingest", *stages],
        "warnings": state.warnings,
        **state.report,
    }
    payload = (json.dumps(manifest, indent=2, sort_keys=True, default=_json_default) + "\n").encode("utf-8")
    out = Path(config.output_dir)
    for name, data in sorted(state.artifacts.items()):
        write_atomic(out / name, data)
    write_atomic(out / MANIFEST, payload)
    return manifest


def _json_default(o: Any) -> Any:
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")
