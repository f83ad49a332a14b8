import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bibliopipe.text import (
    AnnotatedDoc,
    Pos,
    RuleAnnotator,
    TermRules,
    Token,
    annotate_corpus,
    dump_annotations,
    extract_content_lemmas,
    load_annotations,
    tokenize,
    tokenize_and_annotate,
)


def lp(text):
    return [(t.surface, t.lemma, t.pos) for t in tokenize_and_annotate(text)]


def test_drones_flying():
    assert lp("Drones flying") == [("Drones", "drone", Pos.NOUN), ("flying", "fly", Pos.VERB)]


def test_empty_text():
    assert tokenize_and_annotate("") == []


def test_hyphen_and_numerals():
    toks = lp("UAV-based 5G")
    assert [t[0] for t in toks] == ["UAV", "based", "5G"]
    assert toks[0][1] == "uav" and toks[1][1] == "base"
    assert toks[2] == ("5G", "5g", Pos.OTHER)


@pytest.mark.parametrize(
    "word, lemma, pos",
    [
        ("swarms", "swarm", Pos.NOUN),
        ("studies", "study", Pos.NOUN),
        ("approaches", "approach", Pos.NOUN),
        ("planned", "plan", Pos.VERB),
        ("controlled", "control", Pos.VERB),
        ("optimizing", "optimize", Pos.VERB),
        ("tried", "try", Pos.VERB),
        ("larger", "large", Pos.ADJ),
        ("simplest", "simple", Pos.ADJ),
        ("better", "good", Pos.ADJ),
        ("flew", "fly", Pos.VERB),
        ("is", "be", Pos.OTHER),
        ("the", "the", Pos.OTHER),
        ("UAVs", "uav", Pos.NOUN),
        ("UAV's", "uav", Pos.NOUN),
        ("quickly", "quickly", Pos.OTHER),
        ("autonomous", "autonomous", Pos.ADJ),
    ],
)
def test_rule_lemmatizer(word, lemma, pos):
    assert RuleAnnotator().annotate(word) == (lemma, pos)


def test_unknown_word_guesses():
    ann = RuleAnnotator()
    assert ann.annotate("quadcopters") == ("quadcopter", Pos.NOUN)
    assert ann.annotate("hovering")[1] is Pos.VERB
    assert ann.annotate("ballistic") == ("ballistic", Pos.ADJ)


def test_punctuation_not_tokens():
    assert tokenize("Hello, world! (swarm) -- 3.5") == ["Hello", "world", "swarm", "3", "5"]


class Exploding:
    def annotate(self, surface):
        if surface == "boom":
            raise RuntimeError("bad token")
        return surface.lower(), Pos.NOUN


def test_annotator_failure_falls_back():
    stats = {}
    toks = tokenize_and_annotate("swarm boom drone", Exploding(), stats)
    assert [(t.lemma, t.pos) for t in toks] == [("swarm", Pos.NOUN), ("boom", Pos.OTHER), ("drone", Pos.NOUN)]
    assert stats == {"annotation_failures": 1}


RULES = TermRules(frozenset({"paper", "solution"}), {"uav": "drone"})


def doc(*pairs):
    return AnnotatedDoc("d", [Token(lemma, lemma, Pos(pos)) for lemma, pos in pairs])


def test_pos_filter():
    assert extract_content_lemmas(doc(("drone", "NOUN"), ("is", "OTHER")), RULES) == ["drone"]


def test_synonym_merge():
    assert extract_content_lemmas(doc(("uav", "NOUN")), RULES) == ["drone"]


def test_stop_terms():
    assert extract_content_lemmas(doc(("paper", "NOUN"), ("swarm", "NOUN")), RULES) == ["swarm"]


def test_rules_reject_chained_synonyms():
    with pytest.raises(ValueError):
        TermRules(frozenset(), {"uav": "drone", "drone": "aircraft"})


def test_default_rules_file():
    rules = TermRules.default()
    assert {"paper", "solution"} <= rules.stop_terms
    assert "method" not in rules.stop_terms
    assert rules.synonym_map == {"uav": "drone"}
    assert TermRules.from_json('{"stop_terms": ["X"], "synonyms": {"A": "b"}}').synonym_map == {"a": "b"}


words = st.sampled_from(["uav", "drone", "paper", "swarm", "is", "fast", "fly", "solution", "net"])
tags = st.sampled_from(list(Pos))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(words, tags), max_size=40))
def test_content_lemma_properties(pairs):
    d = AnnotatedDoc("d", [Token(w, w, p) for w, p in pairs])
    out = extract_content_lemmas(d, RULES)
    assert not set(out) & (RULES.stop_terms | set(RULES.synonym_map))
    for lemma in set(out):
        qualifying = sum(
            1 for w, p in pairs if p in (Pos.NOUN, Pos.VERB, Pos.ADJ) and RULES.synonym_map.get(w, w) == lemma
        )
        assert out.count(lemma) == qualifying
    assert out == extract_content_lemmas(d, RULES)


@settings(max_examples=100, deadline=None)
@given(st.text(max_size=80))
def test_annotation_total_and_deterministic(text):
    toks = tokenize_and_annotate(text)
    assert [t.surface for t in toks] == tokenize(text)
    assert all(t.lemma and t.lemma == t.lemma.lower() for t in toks)
    assert toks == tokenize_and_annotate(text)


def test_annotation_jsonl_roundtrip():
    docs = [AnnotatedDoc("a", tokenize_and_annotate("Swarms of drones")), AnnotatedDoc("b", [])]
    loaded = load_annotations(dump_annotations(docs).splitlines())
    assert loaded["a"].tokens == docs[0].tokens and loaded["b"].tokens == []
    with pytest.raises(ValueError, match="duplicate"):
        load_annotations(dump_annotations(docs + docs).splitlines())
    with pytest.raises(ValueError, match="line 1"):
        load_annotations(['{"id": "x", "tokens": [{"surface": "a", "lemma": "a", "pos": "PRON"}]}'])


def test_imported_annotations_take_precedence():
    class R:
        def __init__(self, id, abstract):
            self.id, self.abstract = id, abstract

    imported = {"a": AnnotatedDoc("a", [Token("Foo", "bar", Pos.NOUN)])}
    docs = annotate_corpus([R("a", "ignored text"), R("b", "swarm")], imported=imported)
    assert docs[0].tokens[0].lemma == "bar"
    assert docs[1].tokens[0].lemma == "swarm"
