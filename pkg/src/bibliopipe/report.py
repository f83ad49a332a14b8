"""Tables behind the figures: country/year counts and the country coverage filter."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .ingest import Record

UNKNOWN_YEAR = "unknown"


@dataclass
class HeatmapTable:
    row_labels: list[str]
    col_labels: list[str]
    values: np.ndarray
    title: str = ""

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (len(self.row_labels), len(self.col_labels)):
            raise ValueError(
                f"values shape {self.values.shape} does not match "
                f"{len(self.row_labels)}x{len(self.col_labels)} labels"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("heatmap values must be finite")


def rank_countries(records: Iterable[Record]) -> list[tuple[str, int]]:
    totals = Counter(r.country for r in records if r.country)
    return sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))


def retained_countries(
    ranked: Sequence[tuple[str, int]], coverage: float = 0.95, mode: str = "volume"
) -> list[str]:
    """Countries kept for the heatmaps.

    ``volume``: the shortest prefix of the ranking whose share of all
    publications reaches ``coverage``, extended by countries tied with the
    last one kept. ``tail-countries``: drop the ``1 - coverage`` fraction of
    countries with the fewest publications.
    """
    if not 0 < coverage <= 1:
        raise ValueError("coverage must be in (0, 1]")
    if not ranked:
        return []
    if mode == "tail-countries":
        drop = math.floor(round((1 - coverage) * len(ranked), 9))
        return [c for c, _ in ranked[: len(ranked) - drop]]
    if mode != "volume":
        raise ValueError(f"unknown country filter {mode!r}")
    total = sum(n for _, n in ranked)
    need = coverage * total
    cum = 0
    cut = len(ranked)
    for i, (_, n) in enumerate(ranked):
        cum += n
        if cum >= need - 1e-9 * total:
            cut = i + 1
            break
    while cut < len(ranked) and ranked[cut][1] == ranked[cut - 1][1]:
        cut += 1
    return [c for c, _ in ranked[:cut]]


def country_year_counts(
    records: Sequence[Record], coverage: float = 0.95, mode: str = "volume"
) -> HeatmapTable:
    """Publications per retained country (rows, by rank) and year (columns, ascending).

    Records without a year land in a trailing ``unknown`` column so the cell
    total equals the retained country-bearing record count.
    """
    with_country = [r for r in records if r.country]
    if not with_country:
        raise ValueError("no record has a country")
    keep = retained_countries(rank_countries(with_country), coverage, mode)
    kept = [r for r in with_country if r.country in set(keep)]
    years = sorted({r.year for r in kept if r.year is not None})
    cols = [str(y) for y in years]
    if any(r.year is None for r in kept):
        cols.append(UNKNOWN_YEAR)
    col_index = {c: i for i, c in enumerate(cols)}
    row_index = {c: i for i, c in enumerate(keep)}
    values = np.zeros((len(keep), len(cols)))
    for r in kept:
        col = UNKNOWN_YEAR if r.year is None else str(r.year)
        values[row_index[r.country], col_index[col]] += 1
    return HeatmapTable(keep, cols, values, "Publications per country and year")
