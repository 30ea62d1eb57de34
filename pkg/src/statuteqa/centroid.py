"""IDF-weighted word centroids and cosine scoring over articles.

A document's centroid is the IDF-weighted mean of its in-vocabulary
word vectors, L2-normalized. On unit vectors the squared Euclidean
distance and the cosine are equivalent rankings (d^2 = 2 - 2s), so
percent similarity thresholds apply to the cosine directly.

A text with no in-vocabulary token has no centroid; its similarity to
anything is 0, which keeps it below every positive threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import AnalyzerConfig, IdfTable, TokenStream, tokenize
from .bm25 import ScoredHit
from .corpus import Corpus
from .embedding import EmbeddingModel
from .errors import EmptyCorpus, OrdinalOutOfRange


@dataclass
class CentroidStore:
    """Unit-norm article centroids; all-OOV articles hold a zero row."""

    centroids: np.ndarray       # |corpus| x dim
    article_ids: list[str]

    def __len__(self) -> int:
        return len(self.article_ids)

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]

    def is_oov(self, ordinal: int) -> bool:
        return not np.any(self.centroids[ordinal])


def idf_centroid(tokens: TokenStream, model: EmbeddingModel,
                 idf: IdfTable) -> np.ndarray | None:
    """IDF-weighted mean of in-vocabulary vectors, L2-normalized.

    Returns None when every token is out of vocabulary. Scaling all IDF
    weights by a positive constant leaves the result unchanged.
    """
    acc = np.zeros(model.dim)
    wsum = 0.0
    for token in tokens.tokens:
        row = model.vocab.get(token)
        if row is None:
            continue
        w = idf.lookup(token)
        acc += w * model.input_vectors[row]
        wsum += w
    if wsum == 0.0:
        return None
    centroid = acc / wsum
    norm = float(np.linalg.norm(centroid))
    if norm == 0.0:
        return None
    return centroid / norm


def build_centroid_store(corpus: Corpus, model: EmbeddingModel, idf: IdfTable,
                         analyzer: AnalyzerConfig = AnalyzerConfig()) -> CentroidStore:
    if len(corpus) == 0:
        raise EmptyCorpus("cannot build centroids over an empty corpus")
    matrix = np.zeros((len(corpus), model.dim))
    for article in corpus:
        c = idf_centroid(tokenize(article.body, analyzer), model, idf)
        if c is not None:
            matrix[article.ordinal] = c
    return CentroidStore(centroids=matrix, article_ids=[a.id for a in corpus])


def centroid_similarity(query: TokenStream, article_ordinal: int,
                        store: CentroidStore, model: EmbeddingModel,
                        idf: IdfTable) -> float:
    """Cosine of the query and article centroids; 0 if either is all-OOV."""
    if not 0 <= article_ordinal < len(store):
        raise OrdinalOutOfRange(article_ordinal)
    qc = idf_centroid(query, model, idf)
    if qc is None or store.is_oov(article_ordinal):
        return 0.0
    return float(qc @ store.centroids[article_ordinal])


def search_embedding(query: TokenStream, store: CentroidStore,
                     model: EmbeddingModel, idf: IdfTable, k: int) -> list[ScoredHit]:
    """Top-k by similarity desc, ordinal asc on ties; all-OOV articles last."""
    if k < 1:
        raise ValueError("k must be >= 1")
    qc = idf_centroid(query, model, idf)
    hits = []
    for ordinal in range(len(store)):
        oov = store.is_oov(ordinal)
        if qc is None or oov:
            sim = 0.0
        else:
            sim = float(qc @ store.centroids[ordinal])
        hits.append((oov, sim, ordinal))
    hits.sort(key=lambda t: (t[0], -t[1], t[2]))
    return [
        ScoredHit(article_id=store.article_ids[o], score=s,
                  source="embedding", ordinal=o)
        for _, s, o in hits[:k]
    ]


# ---------------------------------------------------------------------------
# Persistence: little-endian f32 matrix + JSON manifest {dim, count}
# ---------------------------------------------------------------------------

CENTROIDS_NAME = "centroids.f32"
CENTROID_MANIFEST_NAME = "centroids.json"


def save_centroid_store(store: CentroidStore, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    matrix = store.centroids.astype("<f4")
    (out / CENTROIDS_NAME).write_bytes(matrix.tobytes(order="C"))
    manifest = {
        "article_ids": store.article_ids,
        "count": len(store),
        "dim": store.dim,
    }
    with open(out / CENTROID_MANIFEST_NAME, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_centroid_store(in_dir: str | Path) -> CentroidStore:
    src = Path(in_dir)
    with open(src / CENTROID_MANIFEST_NAME, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    raw = np.frombuffer((src / CENTROIDS_NAME).read_bytes(), dtype="<f4")
    matrix = raw.reshape(manifest["count"], manifest["dim"]).astype(np.float64)
    return CentroidStore(centroids=matrix,
                         article_ids=[str(x) for x in manifest["article_ids"]])
