"""Abstract text to content lemmas: tokenizer, rule lemmatizer, POS and term rules."""
from __future__ import annotations

import enum
import json
import logging
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping, Protocol

log = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"[^\W_]+(?:['’][^\W_]+)*")
_VOWELS = set("aeiou")


class Pos(str, enum.Enum):
    NOUN = "NOUN"
    VERB = "VERB"
    ADJ = "ADJ"
    OTHER = "OTHER"


CONTENT_POS = frozenset({Pos.NOUN, Pos.VERB, Pos.ADJ})


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    pos: Pos

    def __post_init__(self) -> None:
        if not self.surface or not self.lemma:
            raise ValueError("token surface and lemma must be non-empty")


@dataclass
class AnnotatedDoc:
    doc_id: str
    tokens: list[Token]


@dataclass
class TermRules:
    stop_terms: frozenset[str] = frozenset()
    synonym_map: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.stop_terms = frozenset(t.lower() for t in self.stop_terms)
        self.synonym_map = {k.lower(): v.lower() for k, v in self.synonym_map.items()}
        chained = sorted(v for v in self.synonym_map.values() if v in self.synonym_map)
        if chained:
            raise ValueError(f"synonym targets are themselves mapped: {chained}")

    @classmethod
    def from_json(cls, text: str) -> "TermRules":
        obj = json.loads(text)
        return cls(frozenset(obj.get("stop_terms", ())), dict(obj.get("synonyms", {})))

    @classmethod
    def default(cls) -> "TermRules":
        return cls.from_json(resources.files(__package__).joinpath("data/rules.json").read_text("utf-8"))

    def to_dict(self) -> dict:
        return {"stop_terms": sorted(self.stop_terms), "synonyms": dict(sorted(self.synonym_map.items()))}


class Annotator(Protocol):
    def annotate(self, surface: str) -> tuple[str, Pos]: ...


@dataclass(frozen=True)
class Lexicon:
    pos: Mapping[str, Pos]
    exceptions: Mapping[str, tuple[str, Pos]]

    @classmethod
    def from_json(cls, text: str) -> "Lexicon":
        obj = json.loads(text)
        pos: dict[str, Pos] = {}
        # earlier classes win for words listed twice: bare "control" is a noun
        for tag in ("OTHER", "NOUN", "VERB", "ADJ"):
            for word in obj.get(tag, ()):
                pos.setdefault(word, Pos(tag))
        exceptions = {w: (lemma, Pos(tag)) for w, (lemma, tag) in obj.get("exceptions", {}).items()}
        return cls(pos, exceptions)


@lru_cache(maxsize=1)
def default_lexicon() -> Lexicon:
    return Lexicon.from_json(resources.files(__package__).joinpath("data/lexicon.json").read_text("utf-8"))


def _undouble(stem: str) -> str | None:
    if len(stem) >= 3 and stem[-1] == stem[-2] and stem[-1] not in _VOWELS and stem[-1] not in "lsz":
        return stem[:-1]
    return None


def _verb_stems(stem: str) -> list[str]:
    out = [stem, stem + "e"]
    # lexicon-checked, so any doubled consonant may be undone ("controlled")
    if len(stem) >= 3 and stem[-1] == stem[-2] and stem[-1] not in _VOWELS:
        out.insert(0, stem[:-1])
    return out


class RuleAnnotator:
    """Suffix-rule lemmatizer with an exception lexicon and lexicon-backed POS guesses."""

    def __init__(self, lexicon: Lexicon | None = None):
        self.lexicon = lexicon or default_lexicon()

    def _known(self, word: str, *tags: Pos) -> bool:
        tag = self.lexicon.pos.get(word)
        return tag is not None and (not tags or tag in tags)

    def annotate(self, surface: str) -> tuple[str, Pos]:
        w = surface.lower()
        if w.endswith(("'s", "’s")):
            w = w[:-2]
        w = w.replace("’", "'")
        if not w or any(c.isdigit() for c in w) or not any(c.isalpha() for c in w) or len(w) == 1:
            return w or surface.lower(), Pos.OTHER
        lex = self.lexicon
        if w in lex.exceptions:
            return lex.exceptions[w]
        if w in lex.pos:
            return w, lex.pos[w]

        candidates: list[tuple[str, tuple[Pos, ...], Pos | None]] = []
        if w.endswith("ies") and len(w) > 4:
            candidates.append((w[:-3] + "y", (Pos.NOUN, Pos.VERB), None))
        if w.endswith("es") and len(w) > 3:
            candidates.append((w[:-2], (Pos.NOUN, Pos.VERB), None))
        if w.endswith("s") and not w.endswith(("ss", "us", "is")) and len(w) > 3:
            candidates.append((w[:-1], (Pos.NOUN, Pos.VERB), None))
        if w.endswith("ing") and len(w) > 4:
            candidates += [(s, (), Pos.VERB) for s in _verb_stems(w[:-3])]
        if w.endswith("ied") and len(w) > 4:
            candidates.append((w[:-3] + "y", (), Pos.VERB))
        if w.endswith("ed") and len(w) > 3:
            candidates += [(s, (), Pos.VERB) for s in _verb_stems(w[:-2])]
        if w.endswith("iest") and len(w) > 5:
            candidates.append((w[:-4] + "y", (Pos.ADJ,), None))
        if w.endswith("ier") and len(w) > 4:
            candidates.append((w[:-3] + "y", (Pos.ADJ,), None))
        for suffix in ("est", "er"):
            if w.endswith(suffix) and len(w) > len(suffix) + 2:
                stem = w[: -len(suffix)]
                for s in filter(None, (_undouble(stem), stem, stem + "e")):
                    candidates.append((s, (Pos.ADJ,), None))
        for lemma, tags, forced in candidates:
            if self._known(lemma, *tags) and lex.pos[lemma] is not Pos.OTHER:
                return lemma, forced if forced is not None and lex.pos[lemma] is not Pos.ADJ else lex.pos[lemma]
        return self._guess(w)

    def _guess(self, w: str) -> tuple[str, Pos]:
        """Fallback for words missing from the lexicon."""
        if w.endswith("ly") and len(w) > 4:
            return w, Pos.OTHER
        if w.endswith("ing") and len(w) > 5:
            return _undouble(w[:-3]) or w[:-3], Pos.VERB
        if w.endswith("ed") and len(w) > 4:
            stem = w[:-3] + "y" if w.endswith("ied") else _undouble(w[:-2]) or w[:-2]
            return stem, Pos.VERB
        if w.endswith(("ous", "ive", "al", "ic", "able", "ible", "ful", "less", "ary")):
            return w, Pos.ADJ
        if w.endswith(("ize", "ise", "ify", "ate")):
            return w, Pos.VERB
        if w.endswith("ies") and len(w) > 4:
            return w[:-3] + "y", Pos.NOUN
        if w.endswith(("sses", "shes", "ches", "xes", "zes")):
            return w[:-2], Pos.NOUN
        if w.endswith("s") and not w.endswith(("ss", "us", "is")) and len(w) > 3:
            return w[:-1], Pos.NOUN
        return w, Pos.NOUN


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


def tokenize_and_annotate(
    text: str, annotator: Annotator | None = None, stats: dict | None = None
) -> list[Token]:
    """Tokenize on word boundaries and attach (lemma, POS) to every token.

    A token the annotator fails on keeps its lowercased surface as lemma with
    POS ``OTHER``; failures are counted in ``stats["annotation_failures"]``.
    """
    annotator = annotator or RuleAnnotator()
    tokens = []
    for surface in tokenize(text):
        try:
            lemma, pos = annotator.annotate(surface)
            pos = Pos(pos)
            lemma = lemma.lower()
            if not lemma:
                raise ValueError("empty lemma")
        except Exception as exc:  # annotator is pluggable
            log.warning("annotation failed for %r: %s", surface, exc)
            if stats is not None:
                stats["annotation_failures"] = stats.get("annotation_failures", 0) + 1
            lemma, pos = surface.lower(), Pos.OTHER
        tokens.append(Token(surface, lemma, pos))
    return tokens


def extract_content_lemmas(doc: AnnotatedDoc, rules: TermRules) -> list[str]:
    """Nouns, verbs and adjectives, synonym-mapped, with stop terms removed."""
    out = []
    for tok in doc.tokens:
        if tok.pos not in CONTENT_POS:
            continue
        lemma = rules.synonym_map.get(tok.lemma, tok.lemma)
        if lemma in rules.stop_terms:
            continue
        out.append(lemma)
    return out


def load_annotations(lines: Iterable[str]) -> dict[str, AnnotatedDoc]:
    """Read pre-annotated documents, one JSON object per line."""
    docs: dict[str, AnnotatedDoc] = {}
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        obj = json.loads(line)
        try:
            tokens = [Token(t["surface"], t["lemma"].lower(), Pos(t["pos"])) for t in obj["tokens"]]
            doc_id = str(obj["id"])
        except (KeyError, ValueError, TypeError) as exc:
            raise ValueError(f"annotation line {lineno}: {exc}") from exc
        if doc_id in docs:
            raise ValueError(f"annotation line {lineno}: duplicate id {doc_id!r}")
        docs[doc_id] = AnnotatedDoc(doc_id, tokens)
    return docs


def dump_annotations(docs: Iterable[AnnotatedDoc]) -> str:
    rows = (
        json.dumps(
            {"id": d.doc_id, "tokens": [{"surface": t.surface, "lemma": t.lemma, "pos": t.pos.value} for t in d.tokens]},
            ensure_ascii=False,
        )
        for d in docs
    )
    return "".join(r + "\n" for r in rows)


def annotate_corpus(
    records: Iterable,
    annotator: Annotator | None = None,
    imported: Mapping[str, AnnotatedDoc] | None = None,
    stats: dict | None = None,
) -> list[AnnotatedDoc]:
    """Annotate every record's abstract; imported annotations take precedence by id."""
    annotator = annotator or RuleAnnotator()
    docs = []
    for rec in records:
        if imported is not None and rec.id in imported:
            docs.append(imported[rec.id])
        else:
            docs.append(AnnotatedDoc(rec.id, tokenize_and_annotate(rec.abstract, annotator, stats)))
    return docs
