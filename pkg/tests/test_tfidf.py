import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dense_tfidf

from bibliopipe.tfidf import GroupedScores, group_mean, tfidf_matrix, top_terms


def test_single_document():
    m = tfidf_matrix([("d", ["a", "a", "b"])])
    assert m.vocab.terms == ("a", "b")
    np.testing.assert_allclose(m.idf, [1.0, 1.0])
    np.testing.assert_allclose(m.values.toarray(), [[2 / math.sqrt(5), 1 / math.sqrt(5)]], atol=1e-12)


def test_two_documents():
    m = tfidf_matrix([("d1", ["a", "b"]), ("d2", ["a"])])
    idf_b = math.log(3 / 2) + 1
    assert idf_b == pytest.approx(1.405465, abs=1e-6)
    row = np.array([1.0, idf_b]) / math.hypot(1.0, idf_b)
    np.testing.assert_allclose(m.values.toarray()[0], row, atol=1e-9)
    np.testing.assert_allclose(m.values.toarray()[1], [1.0, 0.0], atol=1e-12)


def test_empty_vocabulary():
    with pytest.raises(ValueError, match="empty vocabulary"):
        tfidf_matrix([("a", []), ("b", [])])
    with pytest.raises(ValueError):
        tfidf_matrix([])


def test_permutation_invariance():
    docs = [("d1", ["x", "y", "y"]), ("d2", ["z"]), ("d3", ["x", "z", "w"])]
    m1 = tfidf_matrix(docs)
    m2 = tfidf_matrix(docs[::-1])
    assert m1.vocab == m2.vocab
    np.testing.assert_allclose(m1.values.toarray(), m2.values.toarray()[::-1], atol=1e-15)


def random_docs(rng, n_docs, n_terms):
    terms = [f"t{i:03d}" for i in range(n_terms)]
    return [(f"d{i}", [rng.choice(terms) for _ in range(rng.randint(0, 30))]) for i in range(n_docs)]


@pytest.mark.parametrize("seed", range(5))
def test_matches_dense_tfidf(seed):
    rng = random.Random(seed)
    docs = random_docs(rng, rng.randint(1, 50), rng.randint(1, 200))
    if not any(l for _, l in docs):
        docs[0] = ("d0", ["t000"])
    m = tfidf_matrix(docs)
    vocab, dense = dense_tfidf(docs)
    assert list(m.vocab.terms) == vocab
    assert np.max(np.abs(m.values.toarray() - dense)) <= 1e-9
    norms = np.linalg.norm(m.values.toarray(), axis=1)
    for (_, lem), nrm in zip(docs, norms):
        assert nrm == pytest.approx(1.0, abs=1e-9) if lem else nrm == 0.0


def test_idf_monotone_in_df():
    m = tfidf_matrix([("a", ["x", "y"]), ("b", ["x"]), ("c", ["x", "z"]), ("d", ["y"])])
    idf = dict(zip(m.vocab.terms, m.idf))
    assert idf["z"] > idf["y"] > idf["x"]


def test_triplets():
    m = tfidf_matrix([("d1", ["b", "a"]), ("d2", ["c"])])
    trip = m.triplets()
    assert [(d, t) for d, t, _ in trip] == [("d1", "a"), ("d1", "b"), ("d2", "c")]
    assert trip[2][2] == pytest.approx(1.0)


def test_group_mean_whole_corpus():
    m = tfidf_matrix([("a", ["x", "y"]), ("b", ["y"]), ("c", ["z"])])
    g = group_mean(m, {"a": "all", "b": "all", "c": "all"})
    np.testing.assert_allclose(g.values[0], m.values.toarray().mean(axis=0))


def test_group_mean_arithmetic():
    m = tfidf_matrix([("d1", ["a"]), ("d2", ["b"])])
    g = group_mean(m, {"d1": "G", "d2": "G"})
    np.testing.assert_allclose(g.values, [[0.5, 0.5]])


def test_group_mean_ordering_and_exclusion():
    m = tfidf_matrix([("a", ["x"]), ("b", ["y"]), ("c", ["z"]), ("d", ["x"])])
    g = group_mean(m, {"a": "uk", "b": "usa", "c": "usa"})
    assert g.groups == ["usa", "uk"] and g.sizes == [2, 1]
    with pytest.raises(KeyError):
        group_mean(m, {"nope": "g"})
    with pytest.raises(ValueError):
        group_mean(m, {})


def test_group_mean_random_oracle():
    rng = random.Random(42)
    docs = random_docs(rng, 10, 15)
    docs[0] = ("d0", ["t000", "t001"])
    m = tfidf_matrix(docs)
    assignment = {d: "g%d" % (i % 3) for i, (d, _) in enumerate(docs)}
    g = group_mean(m, assignment)
    dense = m.values.toarray()
    for gi, name in enumerate(g.groups):
        rows = [i for i, (d, _) in enumerate(docs) if assignment[d] == name]
        np.testing.assert_allclose(g.values[gi], dense[rows].mean(axis=0), atol=1e-15)
        assert np.all(g.values[gi] <= dense[rows].max(axis=0) + 1e-15)


def grouped(values, terms):
    values = np.asarray(values, dtype=float)
    return GroupedScores([f"g{i}" for i in range(len(values))], tuple(terms), values, [1] * len(values))


def test_top_terms_sorting():
    assert top_terms(grouped([[0.5, 0.2, 0.9]], ["t1", "t2", "t3"]), 3) == ["t3", "t1", "t2"]


def test_top_terms_saturates_and_excludes():
    s = grouped([[0.9, 0.5, 0.1]], ["paper", "swarm", "drone"])
    assert top_terms(s, 10) == ["paper", "swarm", "drone"]
    assert top_terms(s, 2, exclude={"paper"}) == ["swarm", "drone"]
    with pytest.raises(ValueError):
        top_terms(s, 0)


def test_top_terms_ties_lexicographic():
    assert top_terms(grouped([[1.0, 1.0, 2.0]], ["b", "a", "c"]), 3) == ["c", "a", "b"]


def test_top_terms_on_matrix_uses_column_means():
    m = tfidf_matrix([("a", ["x", "x", "y"]), ("b", ["z"])])
    means = m.values.toarray().mean(axis=0)
    expected = [m.vocab.terms[i] for i in np.argsort(-means, kind="stable")]
    assert top_terms(m, 3) == expected


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.lists(st.integers(0, 20), min_size=4, max_size=4), min_size=1, max_size=6),
    st.integers(1, 1000),
    st.integers(1, 4),
)
def test_top_terms_scale_invariant(rows, factor, k):
    terms = ["a", "b", "c", "d"]
    assert top_terms(grouped(rows, terms), k) == top_terms(grouped(np.array(rows) * factor, terms), k)
