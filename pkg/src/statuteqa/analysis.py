"""Tokenization, suffix stemming, and corpus IDF statistics.

One analyzer configuration is shared by the lexical scorer, the centroid
scorer, and the entailment gate so that every component sees the same
token stream for a given text.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .errors import EmptyCorpus

if TYPE_CHECKING:
    from .corpus import Corpus


@dataclass(frozen=True)
class AnalyzerConfig:
    """Tokenizer switches, serialized into index manifests.

    ``split_hyphens`` exists because hyphenated legal terms of art
    (e.g. "pre-contract") are out-of-vocabulary for most embedding
    corpora; splitting them trades precision for vocabulary coverage.
    """

    lowercase: bool = True
    split_hyphens: bool = False
    stemmer: str = "porter"

    def to_dict(self) -> dict:
        return {
            "lowercase": self.lowercase,
            "split_hyphens": self.split_hyphens,
            "stemmer": self.stemmer,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnalyzerConfig":
        return cls(
            lowercase=bool(d.get("lowercase", True)),
            split_hyphens=bool(d.get("split_hyphens", False)),
            stemmer=str(d.get("stemmer", "porter")),
        )


@dataclass
class TokenStream:
    """Normalized tokens plus their pre-normalization surface forms."""

    tokens: list[str]
    surface_forms: list[str]

    def __post_init__(self):
        if len(self.tokens) != len(self.surface_forms):
            raise ValueError("tokens and surface_forms must be parallel")
        if any(not t for t in self.tokens):
            raise ValueError("empty token in stream")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


_WORD_RE = re.compile(r"\w+(?:-\w+)*", re.UNICODE)
_WORD_SPLIT_RE = re.compile(r"\w+", re.UNICODE)


def tokenize(text: str, config: AnalyzerConfig = AnalyzerConfig()) -> TokenStream:
    """Segment ``text`` into word tokens.

    Punctuation-only segments never match; an empty text yields an empty
    stream. Hyphenated compounds stay whole unless ``split_hyphens``.
    """
    pattern = _WORD_SPLIT_RE if config.split_hyphens else _WORD_RE
    surfaces = pattern.findall(text)
    tokens = [s.lower() for s in surfaces] if config.lowercase else list(surfaces)
    return TokenStream(tokens=tokens, surface_forms=surfaces)


# ---------------------------------------------------------------------------
# Suffix stemmer (Porter's algorithm, with the sanctioned step-1c revision:
# final y becomes i only after a non-initial consonant, so "may"/"enjoy"
# survive unchanged and repeated application is stable).
# ---------------------------------------------------------------------------

_VOWELS = frozenset("aeiou")


def _is_cons(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_cons(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Count VC sequences: [C](VC)^m[V]."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        if _is_cons(stem, i):
            if prev_vowel:
                m += 1
            prev_vowel = False
        else:
            prev_vowel = True
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _is_cons(stem, i) for i in range(len(stem)))


def _ends_double_cons(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_cons(word, len(word) - 1)
    )


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    return (
        _is_cons(word, len(word) - 3)
        and not _is_cons(word, len(word) - 2)
        and _is_cons(word, len(word) - 1)
        and word[-1] not in "wxy"
    )


def _replace_longest(word: str, rules: list[tuple[str, str]], min_measure: int) -> str:
    """Apply the longest-suffix rule whose measure condition holds.

    Porter semantics: the longest matching suffix is selected first; if
    its condition fails, no other rule in the step fires.
    """
    for suffix, repl in rules:
        if word.endswith(suffix):
            stem = word[: len(word) - len(suffix)]
            if _measure(stem) > min_measure:
                return stem + repl
            return word
    return word


_STEP2 = sorted(
    [
        ("ational", "ate"), ("tional", "tion"), ("enci", "ence"),
        ("anci", "ance"), ("izer", "ize"), ("abli", "able"),
        ("alli", "al"), ("entli", "ent"), ("eli", "e"), ("ousli", "ous"),
        ("ization", "ize"), ("ation", "ate"), ("ator", "ate"),
        ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
        ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"),
        ("biliti", "ble"), ("logi", "log"),
    ],
    key=lambda r: -len(r[0]),
)

_STEP3 = sorted(
    [
        ("icate", "ic"), ("ative", ""), ("alize", "al"),
        ("iciti", "ic"), ("ical", "ic"), ("ful", ""), ("ness", ""),
    ],
    key=lambda r: -len(r[0]),
)

_STEP4 = sorted(
    [
        "al", "ance", "ence", "er", "ic", "able", "ible", "ant",
        "ement", "ment", "ent", "ion", "ou", "ism", "ate", "iti",
        "ous", "ive", "ize",
    ],
    key=len,
    reverse=True,
)


def stem(token: str) -> str:
    """Reduce ``token`` to a canonical stem.

    Deterministic, never empty, and idempotent: the suffix-stripping
    pass is re-applied until a fixed point, so comparing stems is a
    true equivalence (single-pass stripping leaves residues such as
    "agre" that would strip again). Tokens shorter than three
    characters or containing non-letters (numbers, hyphenated
    compounds) pass through lowercased.
    """
    word = token.lower()
    if len(word) <= 2 or not word.isalpha():
        return word
    while True:
        out = _strip_pass(word)
        if out == word or len(out) <= 2:
            return out
        word = out


def _strip_pass(word: str) -> str:

    # step 1a
    if word.endswith("sses"):
        word = word[:-2]
    elif word.endswith("ies"):
        word = word[:-2]
    elif not word.endswith("ss") and word.endswith("s"):
        word = word[:-1]

    # step 1b
    fixup = False
    if word.endswith("eed"):
        if _measure(word[:-3]) > 0:
            word = word[:-1]
    elif word.endswith("ed") and _has_vowel(word[:-2]):
        word = word[:-2]
        fixup = True
    elif word.endswith("ing") and _has_vowel(word[:-3]):
        word = word[:-3]
        fixup = True
    if fixup:
        if word.endswith(("at", "bl", "iz")):
            word += "e"
        elif _ends_double_cons(word) and word[-1] not in "lsz":
            word = word[:-1]
        elif _measure(word) == 1 and _ends_cvc(word):
            word += "e"

    # step 1c (revised): y -> i only after a non-initial consonant
    if (
        word.endswith("y")
        and len(word) > 2
        and _is_cons(word, len(word) - 2)
    ):
        word = word[:-1] + "i"

    word = _replace_longest(word, _STEP2, 0)
    word = _replace_longest(word, _STEP3, 0)

    # step 4
    for suffix in _STEP4:
        if word.endswith(suffix):
            stem_part = word[: len(word) - len(suffix)]
            if _measure(stem_part) > 1 and (
                suffix != "ion" or stem_part.endswith(("s", "t"))
            ):
                word = stem_part
            break

    # step 5a
    if word.endswith("e"):
        stem_part = word[:-1]
        m = _measure(stem_part)
        if m > 1 or (m == 1 and not _ends_cvc(stem_part)):
            word = stem_part

    # step 5b
    if _measure(word) > 1 and _ends_double_cons(word) and word.endswith("l"):
        word = word[:-1]

    return word


# ---------------------------------------------------------------------------
# IDF statistics
# ---------------------------------------------------------------------------


@dataclass
class IdfTable:
    """Document frequencies and smoothed inverse document frequencies.

    idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)), strictly positive even
    for terms present in every document, which keeps lexical scores
    non-negative on small corpora where most legal terms are common.
    """

    doc_count: int
    df: dict[str, int] = field(default_factory=dict)
    idf: dict[str, float] = field(default_factory=dict)

    @property
    def default_idf(self) -> float:
        """Weight for terms never seen at build time (df treated as 0)."""
        return math.log(1.0 + (self.doc_count + 0.5) / 0.5)

    def lookup(self, token: str) -> float:
        return self.idf.get(token, self.default_idf)


def smoothed_idf(doc_count: int, df: int) -> float:
    return math.log(1.0 + (doc_count - df + 0.5) / (df + 0.5))


def build_idf(corpus: "Corpus", config: AnalyzerConfig = AnalyzerConfig()) -> IdfTable:
    """Count per-document term presence over article bodies.

    df counts documents containing a term, not occurrences.
    """
    if len(corpus.articles) == 0:
        raise EmptyCorpus("cannot build IDF over an empty corpus")
    df: Counter[str] = Counter()
    for article in corpus.articles:
        df.update(set(tokenize(article.body, config).tokens))
    n = len(corpus.articles)
    idf = {t: smoothed_idf(n, d) for t, d in df.items()}
    return IdfTable(doc_count=n, df=dict(df), idf=idf)
