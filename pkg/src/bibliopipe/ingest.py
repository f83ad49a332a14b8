"""Scholarly-metadata CSV ingest: parsing, prefix deduplication, filters."""
from __future__ import annotations

import csv
import io
import json
import logging
import re
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence

log = logging.getLogger(__name__)

LOGICAL_COLUMNS = ("title", "abstract", "authors", "country", "year", "id")

# Column names of a Lens.org scholarly export.
DEFAULT_COLUMN_MAP = {
    "id": "Lens ID",
    "title": "Title",
    "abstract": "Abstract",
    "authors": "Author/s",
    "country": "Source Country",
    "year": "Publication Year",
}

YEAR_MIN, YEAR_MAX = 1900, 2100
_YEAR_RE = re.compile(r"(?<!\d)(\d{4})(?!\d)")
_WS_RE = re.compile(r"\s+")


class IngestError(ValueError):
    """Fatal problem with an export file or its column map."""


@dataclass(frozen=True)
class RawRecord:
    row_index: int
    fields: dict[str, str]


@dataclass(frozen=True)
class Record:
    id: str
    title: str
    abstract: str = ""
    authors: tuple[str, ...] = ()
    country: str | None = None
    year: int | None = None


@dataclass
class IngestReport:
    rows_read: int = 0
    parse_errors: int = 0
    duplicates_removed: int = 0
    missing_abstract_removed: int = 0
    year_filtered_removed: int = 0
    survivors: int = 0

    def balanced(self) -> bool:
        return self.rows_read == (
            self.survivors
            + self.duplicates_removed
            + self.missing_abstract_removed
            + self.year_filtered_removed
            + self.parse_errors
        )

    def to_dict(self) -> dict[str, int]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


@dataclass
class Corpus:
    records: list[Record]
    provenance: IngestReport = field(default_factory=IngestReport)
    countries_in_export: int = 0

    def __post_init__(self) -> None:
        ids = [r.id for r in self.records]
        if len(set(ids)) != len(ids):
            raise IngestError("record ids are not unique")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def ids(self) -> list[str]:
        return [r.id for r in self.records]

    def by_id(self) -> dict[str, Record]:
        return {r.id: r for r in self.records}


def load_column_map(text: str | None) -> dict[str, str]:
    """Parse a JSON column map; missing logical names fall back to the Lens defaults."""
    if not text:
        return dict(DEFAULT_COLUMN_MAP)
    user = json.loads(text)
    unknown = set(user) - set(LOGICAL_COLUMNS)
    if unknown:
        raise IngestError(f"unknown logical columns in column map: {sorted(unknown)}")
    merged = dict(DEFAULT_COLUMN_MAP)
    merged.update(user)
    return merged


def parse_export(
    data: bytes | str, column_map: Mapping[str, str] | None = None
) -> tuple[list[RawRecord], int]:
    """Split a CSV export into raw rows.

    Returns the well-formed rows and the number of rows skipped for having
    the wrong number of cells. The header must contain the column mapped to
    ``title``.
    """
    column_map = dict(DEFAULT_COLUMN_MAP if column_map is None else column_map)
    text = data.decode("utf-8-sig") if isinstance(data, bytes) else data
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise IngestError("missing header row") from None
    if not any(h.strip() for h in header):
        raise IngestError("missing header row")
    title_col = column_map.get("title")
    if not title_col or title_col not in header:
        raise IngestError(f"title column {title_col!r} not found in header")

    rows: list[RawRecord] = []
    errors = 0
    index = 0
    try:
        for cells in reader:
            if not cells:
                continue  # blank line
            if len(cells) != len(header):
                log.warning("row %d: %d cells, header has %d", index, len(cells), len(header))
                errors += 1
            else:
                rows.append(RawRecord(index, dict(zip(header, cells))))
            index += 1
    except csv.Error as exc:
        # unterminated quote swallows the rest of the file
        log.warning("row %d: %s", index, exc)
        errors += 1
    return rows, errors


def normalize_space(text: str) -> str:
    return _WS_RE.sub(" ", text).strip()


def split_authors(cell: str, sep: str = ",") -> tuple[str, ...]:
    return tuple(a for a in (normalize_space(p) for p in cell.split(sep)) if a)


def parse_year(cell: str) -> int | None:
    m = _YEAR_RE.search(cell or "")
    if not m:
        return None
    year = int(m.group(1))
    return year if YEAR_MIN <= year <= YEAR_MAX else None


def normalize_country(cell: str | None) -> str | None:
    if cell is None:
        return None
    value = normalize_space(cell).lower()
    return value or None


def to_records(
    raw: Iterable[RawRecord],
    column_map: Mapping[str, str] | None = None,
    author_sep: str = ",",
) -> tuple[list[Record], int]:
    """Convert raw rows to records; rows without a usable title count as errors."""
    column_map = dict(DEFAULT_COLUMN_MAP if column_map is None else column_map)

    def get(row: RawRecord, name: str) -> str:
        col = column_map.get(name)
        return row.fields.get(col, "") if col else ""

    records: list[Record] = []
    seen: set[str] = set()
    errors = 0
    for row in raw:
        title = normalize_space(get(row, "title"))
        if not title:
            errors += 1
            continue
        rid = get(row, "id").strip() or f"row:{row.row_index}"
        if rid in seen:
            rid = f"{rid}#row:{row.row_index}"
        seen.add(rid)
        records.append(
            Record(
                id=rid,
                title=title,
                abstract=get(row, "abstract").strip(),
                authors=split_authors(get(row, "authors"), author_sep),
                country=normalize_country(get(row, "country")),
                year=parse_year(get(row, "year")),
            )
        )
    return records, errors


def dedup_key(record: Record, prefix_len: int = 40, fields: Sequence[str] = ("title", "abstract")) -> str:
    joined = " ".join(getattr(record, f).lower() for f in fields)
    return joined[:prefix_len]


def deduplicate(
    records: Sequence[Record],
    prefix_len: int = 40,
    fields: Sequence[str] = ("title", "abstract"),
) -> tuple[list[Record], int]:
    """Drop records whose lowercased prefix key was already seen; first one wins."""
    if prefix_len < 1:
        raise ValueError("prefix_len must be >= 1")
    seen: set[str] = set()
    kept: list[Record] = []
    for rec in records:
        key = dedup_key(rec, prefix_len, fields)
        if key in seen:
            continue
        seen.add(key)
        kept.append(rec)
    return kept, len(records) - len(kept)


def filter_records(
    records: Sequence[Record], min_year: int = 2003, require_abstract: bool = True
) -> tuple[list[Record], dict[str, int]]:
    """Remove records without an abstract and records dated before ``min_year``.

    Records with no year are kept. A record failing both tests is counted
    once, under the missing-abstract bucket.
    """
    kept: list[Record] = []
    deltas = {"missing_abstract_removed": 0, "year_filtered_removed": 0}
    for rec in records:
        if require_abstract and not rec.abstract.strip():
            deltas["missing_abstract_removed"] += 1
        elif rec.year is not None and rec.year < min_year:
            deltas["year_filtered_removed"] += 1
        else:
            kept.append(rec)
    return kept, deltas


def ingest(
    data: bytes | str,
    column_map: Mapping[str, str] | None = None,
    *,
    prefix_len: int = 40,
    dedup_fields: Sequence[str] = ("title", "abstract"),
    min_year: int = 2003,
    require_abstract: bool = True,
    author_sep: str = ",",
) -> Corpus:
    """Parse, deduplicate and filter an export into a :class:`Corpus`."""
    raw, parse_errors = parse_export(data, column_map)
    records, bad_rows = to_records(raw, column_map, author_sep)
    report = IngestReport(rows_read=len(raw) + parse_errors, parse_errors=parse_errors + bad_rows)
    countries_in_export = sum(1 for r in records if r.country)
    records, report.duplicates_removed = deduplicate(records, prefix_len, dedup_fields)
    records, deltas = filter_records(records, min_year, require_abstract)
    report.missing_abstract_removed = deltas["missing_abstract_removed"]
    report.year_filtered_removed = deltas["year_filtered_removed"]
    report.survivors = len(records)
    assert report.balanced(), report
    return Corpus(records, report, countries_in_export)
