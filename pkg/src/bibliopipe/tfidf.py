"""Sparse tf-idf term-document matrix, group means and top-term ranking."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]

    def __post_init__(self) -> None:
        if list(self.terms) != sorted(set(self.terms)):
            raise ValueError("vocabulary terms must be unique and sorted")

    @property
    def index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.terms)}

    def __len__(self) -> int:
        return len(self.terms)


@dataclass
class TermDocMatrix:
    vocab: Vocabulary
    rows: list[str]
    values: sparse.csr_matrix
    idf: np.ndarray

    @property
    def row_index(self) -> dict[str, int]:
        return {d: i for i, d in enumerate(self.rows)}

    def triplets(self) -> list[tuple[str, str, float]]:
        """(doc_id, term, value) for every stored non-zero, row-major."""
        coo = self.values.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [
            (self.rows[coo.row[i]], self.vocab.terms[coo.col[i]], float(coo.data[i]))
            for i in order
        ]


@dataclass
class GroupedScores:
    groups: list[str]
    terms: tuple[str, ...]
    values: np.ndarray
    sizes: list[int]


def tfidf_matrix(docs: Sequence[tuple[str, Sequence[str]]]) -> TermDocMatrix:
    """tf-idf with raw counts, smoothed idf ``ln((1+N)/(1+df)) + 1`` and L2-normalized rows."""
    if not docs:
        raise ValueError("no documents")
    counts = [Counter(lemmas) for _, lemmas in docs]
    vocab = Vocabulary(tuple(sorted(set().union(*counts))))
    if not len(vocab):
        raise ValueError("empty vocabulary")
    index = vocab.index
    n = len(docs)

    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for c in counts:
        cols = sorted(index[t] for t in c)
        indices.extend(cols)
        data.extend(float(c[vocab.terms[j]]) for j in cols)
        indptr.append(len(indices))
    tf = sparse.csr_matrix(
        (np.asarray(data), np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
        shape=(n, len(vocab)),
    )
    df = np.bincount(tf.indices, minlength=len(vocab))
    idf = np.log((1.0 + n) / (1.0 + df)) + 1.0
    weighted = tf.multiply(idf[None, :]).tocsr()
    norms = np.sqrt(np.asarray(weighted.multiply(weighted).sum(axis=1)).ravel())
    scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    values = sparse.diags(scale).dot(weighted).tocsr()
    values.sort_indices()
    return TermDocMatrix(vocab, [d for d, _ in docs], values, idf)


def group_mean(matrix: TermDocMatrix, assignment: Mapping[str, str]) -> GroupedScores:
    """Per-group column means over member documents (absent terms count as zero).

    Groups are ordered by member count, largest first, then by name.
    """
    rindex = matrix.row_index
    missing = sorted(d for d in assignment if d not in rindex)
    if missing:
        raise KeyError(f"documents not in matrix: {missing[:5]}")
    members: dict[str, list[int]] = {}
    for doc in matrix.rows:
        if doc in assignment:
            members.setdefault(str(assignment[doc]), []).append(rindex[doc])
    if not members:
        raise ValueError("no assigned documents")
    groups = sorted(members, key=lambda g: (-len(members[g]), g))
    values = np.vstack(
        [np.asarray(matrix.values[members[g]].mean(axis=0)).ravel() for g in groups]
    )
    return GroupedScores(groups, matrix.vocab.terms, values, [len(members[g]) for g in groups])


def overall_means(scores: GroupedScores | TermDocMatrix) -> tuple[tuple[str, ...], np.ndarray]:
    if isinstance(scores, TermDocMatrix):
        return scores.vocab.terms, np.asarray(scores.values.mean(axis=0)).ravel()
    return scores.terms, scores.values.mean(axis=0)


def rank_terms(terms: Sequence[str], weights: np.ndarray, k: int, exclude: Iterable[str] = ()) -> list[str]:
    if k < 1:
        raise ValueError("k must be >= 1")
    excluded = set(exclude)
    order = sorted(
        (i for i, t in enumerate(terms) if t not in excluded),
        key=lambda i: (-weights[i], terms[i]),
    )
    return [terms[i] for i in order[:k]]


def top_terms(scores: GroupedScores | TermDocMatrix, k: int, exclude: Iterable[str] = ()) -> list[str]:
    """Terms by mean score over all rows, descending; exclusions apply before the cut."""
    terms, weights = overall_means(scores)
    return rank_terms(terms, weights, k, exclude)
