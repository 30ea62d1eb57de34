"""CBOW word-embedding training with negative sampling, plus vector IO.

Training is single-threaded and fully seeded so repeat runs produce
bitwise-identical vectors. A second training stage on another corpus is
supported; the learning-rate schedule and sampling state restart at the
stage boundary.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysis import TokenStream
from .errors import DuplicateWord, EmptyVocabulary, HeaderMismatch, MalformedLine

NOISE_EXPONENT = 0.75


@dataclass(frozen=True)
class CbowConfig:
    dim: int = 300
    window: int = 5
    epochs: int = 100
    learning_rate: float = 0.025
    min_learning_rate: float = 1e-4
    negative: int = 5
    min_count: int = 1
    seed: int = 1

    def __post_init__(self):
        if self.dim <= 0 or self.window < 1 or self.epochs < 0:
            raise ValueError("dim, window must be positive; epochs >= 0")
        if self.learning_rate <= 0 or self.negative < 1 or self.min_count < 1:
            raise ValueError("learning_rate, negative, min_count must be positive")


@dataclass
class EmbeddingModel:
    dim: int
    vocab: dict[str, int]
    words: list[str]
    input_vectors: np.ndarray                  # |V| x dim
    output_vectors: np.ndarray | None = None   # training only
    window: int = 5
    seed: int = 0
    counts: dict[str, int] = field(default_factory=dict)
    loss_history: list[float] = field(default_factory=list)

    def __post_init__(self):
        if self.input_vectors.shape != (len(self.words), self.dim):
            raise ValueError("vector matrix shape disagrees with vocab")
        if not np.all(np.isfinite(self.input_vectors)):
            raise ValueError("non-finite entries in input vectors")

    def __contains__(self, token: str) -> bool:
        return token in self.vocab

    def vector(self, token: str) -> np.ndarray:
        return self.input_vectors[self.vocab[token]]


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def negative_sampling_loss(input_vectors: np.ndarray, output_vectors: np.ndarray,
                           center: int, context: list[int],
                           negatives: list[int]) -> float:
    """Loss for one (center, context) pair under negative sampling:

    L = -log sigma(u_c . h) - sum_n log sigma(-u_n . h),
    h = mean of the context rows of the input matrix.
    """
    h = input_vectors[context].mean(axis=0)
    pos = float(output_vectors[center] @ h)
    loss = float(np.logaddexp(0.0, -pos))
    for n in negatives:
        loss += float(np.logaddexp(0.0, float(output_vectors[n] @ h)))
    return loss


def negative_sampling_gradients(
    input_vectors: np.ndarray, output_vectors: np.ndarray,
    center: int, context: list[int], negatives: list[int],
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradients of ``negative_sampling_loss`` w.r.t. both matrices.

    Returns dense (d input, d output) arrays of the same shapes; rows not
    touched by the example are zero.
    """
    h = input_vectors[context].mean(axis=0)
    targets = np.array([center] + list(negatives), dtype=np.intp)
    labels = np.zeros(len(targets))
    labels[0] = 1.0
    u = output_vectors[targets]
    g = _sigmoid(u @ h) - labels          # dL/d(dot)
    grad_h = g @ u

    grad_in = np.zeros_like(input_vectors)
    np.add.at(grad_in, context, grad_h / len(context))
    grad_out = np.zeros_like(output_vectors)
    np.add.at(grad_out, targets, np.outer(g, h))
    return grad_in, grad_out


def train_cbow(corpus_texts: list[TokenStream], config: CbowConfig) -> EmbeddingModel:
    """Train a fresh model; deterministic for a fixed config."""
    counts: Counter[str] = Counter()
    for stream in corpus_texts:
        counts.update(stream.tokens)
    kept = sorted(
        (t for t, c in counts.items() if c >= config.min_count),
        key=lambda t: (-counts[t], t),
    )
    if not kept:
        raise EmptyVocabulary(f"no token reached min_count={config.min_count}")

    rng = np.random.default_rng(config.seed)
    vocab = {t: i for i, t in enumerate(kept)}
    model = EmbeddingModel(
        dim=config.dim,
        vocab=vocab,
        words=kept,
        input_vectors=(rng.random((len(kept), config.dim)) - 0.5) / config.dim,
        output_vectors=np.zeros((len(kept), config.dim)),
        window=config.window,
        seed=config.seed,
        counts={t: counts[t] for t in kept},
    )
    _run_epochs(model, corpus_texts, config)
    return model


def continue_training(model: EmbeddingModel, corpus_texts: list[TokenStream],
                      config: CbowConfig) -> EmbeddingModel:
    """Second-stage training on another corpus.

    Unseen tokens meeting min_count join the vocabulary with fresh rows;
    the learning-rate schedule restarts.
    """
    if model.output_vectors is None:
        raise ValueError("model has no output vectors; cannot continue training")
    counts: Counter[str] = Counter()
    for stream in corpus_texts:
        counts.update(stream.tokens)
    new = sorted(
        (t for t, c in counts.items()
         if c >= config.min_count and t not in model.vocab),
        key=lambda t: (-counts[t], t),
    )
    if new:
        rng = np.random.default_rng((config.seed, len(model.vocab)))
        rows = (rng.random((len(new), config.dim)) - 0.5) / config.dim
        model.input_vectors = np.vstack([model.input_vectors, rows])
        model.output_vectors = np.vstack(
            [model.output_vectors, np.zeros((len(new), config.dim))]
        )
        for t in new:
            model.vocab[t] = len(model.words)
            model.words.append(t)
    for t, c in counts.items():
        if t in model.vocab:
            model.counts[t] = model.counts.get(t, 0) + c
    _run_epochs(model, corpus_texts, config)
    return model


def _noise_cumulative(model: EmbeddingModel) -> np.ndarray:
    weights = np.array(
        [model.counts.get(t, 1) for t in model.words], dtype=np.float64
    ) ** NOISE_EXPONENT
    cum = np.cumsum(weights)
    return cum / cum[-1]


def _run_epochs(model: EmbeddingModel, corpus_texts: list[TokenStream],
                config: CbowConfig) -> None:
    sentences = [
        np.array([model.vocab[t] for t in stream.tokens if t in model.vocab],
                 dtype=np.intp)
        for stream in corpus_texts
    ]
    sentences = [s for s in sentences if len(s) >= 2]
    noise_cum = _noise_cumulative(model)
    rng = np.random.default_rng(config.seed)
    inp, out = model.input_vectors, model.output_vectors
    window, k_neg = config.window, config.negative

    for epoch in range(config.epochs):
        if config.epochs > 1:
            frac = epoch / (config.epochs - 1)
        else:
            frac = 0.0
        lr = config.learning_rate + (config.min_learning_rate - config.learning_rate) * frac
        total, n_steps = 0.0, 0
        for sent in sentences:
            for pos in range(len(sent)):
                lo = max(0, pos - window)
                ctx = np.concatenate([sent[lo:pos], sent[pos + 1:pos + window + 1]])
                if len(ctx) == 0:
                    continue
                center = int(sent[pos])
                draws = np.searchsorted(noise_cum, rng.random(k_neg))
                negs = draws[draws != center]

                h = inp[ctx].mean(axis=0)
                targets = np.concatenate([[center], negs])
                labels = np.zeros(len(targets))
                labels[0] = 1.0
                u = out[targets]
                dots = u @ h
                total += float(
                    np.logaddexp(0.0, -dots[0]) + np.logaddexp(0.0, dots[1:]).sum()
                )
                n_steps += 1
                g = _sigmoid(dots) - labels
                grad_h = g @ u
                np.add.at(out, targets, -lr * np.outer(g, h))
                np.add.at(inp, ctx, -lr * grad_h / len(ctx))
        model.loss_history.append(total / max(n_steps, 1))


# ---------------------------------------------------------------------------
# word2vec text format: header "vocab_size dim", then "word v1 ... v_dim"
# ---------------------------------------------------------------------------


def save_vectors(model: EmbeddingModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(model.words)} {model.dim}\n")
        for i, word in enumerate(model.words):
            values = " ".join(f"{x:.6f}" for x in model.input_vectors[i])
            fh.write(f"{word} {values}\n")


def load_vectors(path: str | Path) -> EmbeddingModel:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise HeaderMismatch("empty vector file")
    header = lines[0].split()
    if len(header) != 2:
        raise MalformedLine(1, "header must be 'vocab_size dim'")
    try:
        vocab_size, dim = int(header[0]), int(header[1])
    except ValueError as exc:
        raise MalformedLine(1, "header must be two integers") from exc

    body = [l for l in lines[1:] if l.strip()]
    if len(body) != vocab_size:
        raise HeaderMismatch(
            f"header declares {vocab_size} rows, file has {len(body)}"
        )
    words: list[str] = []
    vocab: dict[str, int] = {}
    matrix = np.empty((vocab_size, dim))
    for row, line in enumerate(body):
        fields = line.split()
        if len(fields) != dim + 1 or not fields[0]:
            raise MalformedLine(row + 2, f"expected word + {dim} values")
        word = fields[0]
        if word in vocab:
            raise DuplicateWord(word)
        try:
            matrix[row] = [float(x) for x in fields[1:]]
        except ValueError as exc:
            raise MalformedLine(row + 2, "non-numeric vector entry") from exc
        vocab[word] = row
        words.append(word)
    return EmbeddingModel(
        dim=dim, vocab=vocab, words=words, input_vectors=matrix,
        output_vectors=None, window=5, seed=0,
    )
