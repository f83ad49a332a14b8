"""Document vectors: mean of word vectors, or imported model embeddings."""
from __future__ import annotations

import enum
import gzip
import io
import json
import logging
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from .ingest import Corpus

log = logging.getLogger(__name__)


class EmbeddingSource(str, enum.Enum):
    MEAN_WORD_VECTORS = "MEAN_WORD_VECTORS"
    IMPORTED = "IMPORTED"
    TFIDF = "TFIDF"


class EmbeddingFormatError(ValueError):
    pass


@dataclass
class WordVectorTable:
    dim: int
    vectors: dict[str, np.ndarray]
    warnings: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass
class EmbeddingMatrix:
    ids: list[str]
    vectors: np.ndarray
    source: EmbeddingSource
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.vectors = np.asarray(self.vectors, dtype=np.float64).reshape(len(self.ids), -1)
        if len(set(self.ids)) != len(self.ids):
            raise EmbeddingFormatError("embedding row ids are not unique")
        if not np.all(np.isfinite(self.vectors)):
            raise EmbeddingFormatError("embedding contains non-finite values")

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.ids)


def open_text(data: bytes | str | IO[bytes]) -> io.TextIOBase:
    """Text view over raw bytes, a path, or a binary stream; gzip is detected by magic bytes."""
    if isinstance(data, str):
        with open(data, "rb") as fh:
            data = fh.read()
    elif not isinstance(data, bytes):
        data = data.read()
    if data[:2] == b"\x1f\x8b":
        data = gzip.decompress(data)
    return io.StringIO(data.decode("utf-8"))


def load_word_vectors(data: bytes | str | IO[bytes]) -> WordVectorTable:
    """Read ``word v1 ... vd`` lines, with an optional ``count dim`` header line."""
    vectors: dict[str, np.ndarray] = {}
    warnings: list[str] = []
    dim: int | None = None
    for lineno, line in enumerate(open_text(data), 1):
        parts = line.split()
        if not parts:
            continue
        if lineno == 1 and len(parts) == 2 and parts[0].isdigit() and parts[1].isdigit():
            dim = int(parts[1])
            continue
        word, comps = parts[0], parts[1:]
        if dim is None:
            dim = len(comps)
        if len(comps) != dim or dim == 0:
            raise EmbeddingFormatError(f"line {lineno}: expected {dim} components, found {len(comps)}")
        try:
            vec = np.array([float(c) for c in comps])
        except ValueError:
            raise EmbeddingFormatError(f"line {lineno}: non-numeric component") from None
        if not np.all(np.isfinite(vec)):
            raise EmbeddingFormatError(f"line {lineno}: non-finite component")
        if word in vectors:
            warnings.append(f"line {lineno}: duplicate word {word!r}, keeping last")
            log.warning(warnings[-1])
        vectors[word] = vec
    if dim is None:
        raise EmbeddingFormatError("no word vectors found")
    return WordVectorTable(dim, vectors, warnings)


def embed_mean(docs: Sequence[tuple[str, Sequence[str]]], table: WordVectorTable) -> EmbeddingMatrix:
    """Average the table vectors of each document's in-vocabulary lemmas.

    Documents without any known lemma get the zero vector and a warning.
    """
    if not len(table):
        raise ValueError("word vector table is empty")
    out = np.zeros((len(docs), table.dim))
    warnings = []
    for i, (doc_id, lemmas) in enumerate(docs):
        known = [table.vectors[w] for w in lemmas if w in table.vectors]
        if known:
            out[i] = np.mean(known, axis=0)
        else:
            warnings.append(f"{doc_id}: no in-vocabulary lemmas, zero vector")
    return EmbeddingMatrix([d for d, _ in docs], out, EmbeddingSource.MEAN_WORD_VECTORS, warnings)


def import_embeddings(data: bytes | str | IO[bytes], corpus: Corpus) -> EmbeddingMatrix:
    """Read ``{"id": ..., "vector": [...]}`` lines and align them to corpus order."""
    wanted = set(corpus.ids)
    found: dict[str, np.ndarray] = {}
    seen: set[str] = set()
    warnings: list[str] = []
    dim: int | None = None
    for lineno, line in enumerate(open_text(data), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            doc_id = str(obj["id"])
            vec = np.asarray(obj["vector"], dtype=np.float64)
        except (ValueError, KeyError, TypeError) as exc:
            raise EmbeddingFormatError(f"line {lineno}: {exc}") from exc
        if vec.ndim != 1 or not len(vec) or not np.all(np.isfinite(vec)):
            raise EmbeddingFormatError(f"line {lineno}: vector must be a non-empty list of finite numbers")
        if dim is None:
            dim = len(vec)
        elif len(vec) != dim:
            raise EmbeddingFormatError(f"line {lineno}: dimension {len(vec)} != {dim}")
        if doc_id in seen:
            raise EmbeddingFormatError(f"line {lineno}: duplicate id {doc_id!r}")
        seen.add(doc_id)
        if doc_id not in wanted:
            warnings.append(f"{doc_id}: not in corpus, skipped")
            continue
        found[doc_id] = vec
    missing = [d for d in corpus.ids if d not in found]
    if missing:
        warnings.append(f"{len(missing)} corpus documents have no embedding")
    ids = [d for d in corpus.ids if d in found]
    vectors = np.vstack([found[d] for d in ids]) if ids else np.zeros((0, dim or 0))
    return EmbeddingMatrix(ids, vectors, EmbeddingSource.IMPORTED, warnings)


def dump_embeddings(matrix: EmbeddingMatrix) -> str:
    return "".join(
        json.dumps({"id": d, "vector": [float(x) for x in v]}) + "\n"
        for d, v in zip(matrix.ids, matrix.vectors)
    )
