"""Inverted index with Okapi BM25 scoring over statute articles.

Candidate generation is boolean OR: any article sharing at least one
query term is scored. Scores are raw (unnormalized) because the fusion
layer compares them against query length.
"""

from __future__ import annotations

import json
import struct
from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .analysis import AnalyzerConfig, IdfTable, TokenStream, smoothed_idf, tokenize
from .corpus import Corpus
from .errors import EmptyCorpus, OrdinalOutOfRange


@dataclass(frozen=True)
class Bm25Params:
    """Okapi parameters; defaults are the standard settings."""

    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self):
        if self.k1 < 0:
            raise ValueError("k1 must be >= 0")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError("b must be in [0, 1]")


@dataclass(frozen=True)
class ScoredHit:
    """One ranked result from either scorer."""

    article_id: str
    score: float
    source: str          # "lexical" | "embedding"
    ordinal: int


@dataclass
class InvertedIndex:
    postings: dict[str, list[tuple[int, int]]]   # token -> [(ordinal, tf)]
    doc_len: list[int]
    avg_doc_len: float
    idf: IdfTable
    params: Bm25Params
    article_ids: list[str]
    analyzer: AnalyzerConfig = field(default_factory=AnalyzerConfig)

    def __len__(self) -> int:
        return len(self.doc_len)


def build_index(corpus: Corpus, analyzer: AnalyzerConfig = AnalyzerConfig(),
                params: Bm25Params = Bm25Params()) -> InvertedIndex:
    if len(corpus) == 0:
        raise EmptyCorpus("cannot index an empty corpus")
    postings: dict[str, list[tuple[int, int]]] = {}
    doc_len: list[int] = []
    df: dict[str, int] = {}
    for article in corpus:
        counts = Counter(tokenize(article.body, analyzer).tokens)
        doc_len.append(sum(counts.values()))
        for token, tf in counts.items():
            postings.setdefault(token, []).append((article.ordinal, tf))
            df[token] = df.get(token, 0) + 1
    n = len(corpus)
    idf = IdfTable(
        doc_count=n,
        df=df,
        idf={t: smoothed_idf(n, d) for t, d in df.items()},
    )
    return InvertedIndex(
        postings=postings,
        doc_len=doc_len,
        avg_doc_len=sum(doc_len) / n,
        idf=idf,
        params=params,
        article_ids=[a.id for a in corpus],
        analyzer=analyzer,
    )


def _term_freq(index: InvertedIndex, token: str, ordinal: int) -> int:
    plist = index.postings.get(token)
    if not plist:
        return 0
    pos = bisect_left(plist, (ordinal,))
    if pos < len(plist) and plist[pos][0] == ordinal:
        return plist[pos][1]
    return 0


def bm25_score(index: InvertedIndex, query: TokenStream, article_ordinal: int) -> float:
    """Sum the Okapi contribution of every query token occurrence.

    score = sum_t idf(t) * tf*(k1+1) / (tf + k1*(1 - b + b*dl/avgdl))
    """
    if not 0 <= article_ordinal < len(index):
        raise OrdinalOutOfRange(article_ordinal)
    k1, b = index.params.k1, index.params.b
    norm = k1 * (1.0 - b + b * index.doc_len[article_ordinal] / index.avg_doc_len)
    score = 0.0
    for token in query.tokens:
        tf = _term_freq(index, token, article_ordinal)
        if tf == 0:
            continue
        score += index.idf.idf[token] * tf * (k1 + 1.0) / (tf + norm)
    return score


def search_bm25(index: InvertedIndex, query: TokenStream, k: int) -> list[ScoredHit]:
    """Rank the boolean-OR candidate set, score desc then ordinal asc."""
    if k < 1:
        raise ValueError("k must be >= 1")
    candidates: set[int] = set()
    for token in set(query.tokens):
        for ordinal, _ in index.postings.get(token, ()):
            candidates.add(ordinal)
    scored = [
        ScoredHit(
            article_id=index.article_ids[ordinal],
            score=bm25_score(index, query, ordinal),
            source="lexical",
            ordinal=ordinal,
        )
        for ordinal in candidates
    ]
    scored.sort(key=lambda h: (-h.score, h.ordinal))
    return scored[:k]


# ---------------------------------------------------------------------------
# Persistence: JSON manifest + binary postings (little-endian u32 pairs)
# ---------------------------------------------------------------------------

MANIFEST_NAME = "index.json"
POSTINGS_NAME = "postings.bin"


def save_index(index: InvertedIndex, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    vocab = sorted(index.postings)
    offsets: list[int] = []
    counts: list[int] = []
    off = 0
    with open(out / POSTINGS_NAME, "wb") as fh:
        for token in vocab:
            plist = index.postings[token]
            offsets.append(off)
            counts.append(len(plist))
            for ordinal, tf in plist:
                fh.write(struct.pack("<II", ordinal, tf))
            off += len(plist)
    manifest = {
        "analyzer": index.analyzer.to_dict(),
        "article_ids": index.article_ids,
        "avg_doc_len": index.avg_doc_len,
        "doc_count": len(index),
        "doc_len": index.doc_len,
        "params": {"k1": index.params.k1, "b": index.params.b},
        "vocab": vocab,
        "postings_offsets": offsets,
        "postings_counts": counts,
    }
    with open(out / MANIFEST_NAME, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_index(in_dir: str | Path) -> InvertedIndex:
    src = Path(in_dir)
    with open(src / MANIFEST_NAME, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    raw = (src / POSTINGS_NAME).read_bytes()
    pairs = [struct.unpack_from("<II", raw, i * 8) for i in range(len(raw) // 8)]
    postings: dict[str, list[tuple[int, int]]] = {}
    df: dict[str, int] = {}
    for token, off, cnt in zip(
        manifest["vocab"], manifest["postings_offsets"], manifest["postings_counts"]
    ):
        plist = [(int(o), int(tf)) for o, tf in pairs[off:off + cnt]]
        postings[token] = plist
        df[token] = len(plist)
    n = manifest["doc_count"]
    idf = IdfTable(
        doc_count=n,
        df=df,
        idf={t: smoothed_idf(n, d) for t, d in df.items()},
    )
    return InvertedIndex(
        postings=postings,
        doc_len=[int(x) for x in manifest["doc_len"]],
        avg_doc_len=float(manifest["avg_doc_len"]),
        idf=idf,
        params=Bm25Params(**manifest["params"]),
        article_ids=[str(x) for x in manifest["article_ids"]],
        analyzer=AnalyzerConfig.from_dict(manifest["analyzer"]),
    )
