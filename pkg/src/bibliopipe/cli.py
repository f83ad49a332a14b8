"""Command line interface: ``bibliopipe {ingest,network,heatmaps,cluster,run}``."""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .pipeline import STAGES, RunConfig, RunState, StageError, check_inputs, run_pipeline, stage_ingest

SUBCOMMAND_STAGES = {
    "network": ("network",),
    "heatmaps": ("heatmaps",),
    "cluster": ("cluster",),
    "run": STAGES,
}

_HELP = {
    "input": "scholarly-metadata CSV export",
    "output_dir": "directory for CSV/SVG artifacts and manifest.json",
    "column_map": "JSON file mapping title/abstract/authors/country/year/id to header names",
    "rules": "JSON term rules file (stop_terms, synonyms)",
    "annotations": "pre-annotated documents, JSON lines",
    "word_vectors": "word vector text file (word v1 ... vd)",
    "embeddings": "document embeddings, JSON lines {id, vector}",
    "dedup_fields": "title, abstract or title+abstract",
    "country_filter": "volume (cumulative share) or tail-countries",
    "embedding_source": "auto, word-vectors, import or tfidf",
    "cluster_backend": "kmeans, dbscan or auto",
    "n_clusters": "fixed k instead of the elbow choice",
    "projection": "2D projection for the scatter plot (pca)",
}


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file with RunConfig keys")
    for f in dataclasses.fields(RunConfig):
        flag = "--" + f.name.replace("_", "-")
        kind = f.type if isinstance(f.type, str) else f.type.__name__
        conv = int if kind.startswith("int") else float if kind.startswith("float") else str
        # SUPPRESS keeps unspecified flags out of the namespace so config files can fill them
        p.add_argument(flag, dest=f.name, type=conv, default=argparse.SUPPRESS, help=_HELP.get(f.name))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bibliopipe", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("ingest", help="parse, deduplicate and filter; print the ingest report")
    _add_config_args(p)
    for name, help_ in (
        ("network", "co-author network: edges.csv, layout.csv and its SVG"),
        ("heatmaps", "country/year and term/country heatmaps"),
        ("cluster", "embed, cluster and project abstracts"),
        ("run", "whole pipeline"),
    ):
        _add_config_args(sub.add_parser(name, help=help_))
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(json.loads(Path(args.config).read_text("utf-8")))
    names = {f.name for f in dataclasses.fields(RunConfig)}
    values.update({k: v for k, v in vars(args).items() if k in names})
    return RunConfig.from_mapping(values)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = config_from_args(args)
        if args.command == "ingest":
            config.validate()
            check_inputs(config)
            state = RunState(config)
            try:
                stage_ingest(state)
            except Exception as exc:
                raise StageError("ingest", exc) from exc
            print(json.dumps(state.report["ingest"], indent=2, sort_keys=True))
            return 0
        manifest = run_pipeline(config, SUBCOMMAND_STAGES[args.command])
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    print(json.dumps({"output_dir": config.output_dir, "artifacts": sorted(manifest["artifacts"])}, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
