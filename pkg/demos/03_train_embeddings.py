"""Train word vectors on statute text with CBOW + negative sampling.

The trainer predicts a word from the mean of its context window and
pushes sampled noise words away. Two corpora are trained in sequence
(an auxiliary statute first, then the target statute), mirroring how a
small target corpus is enriched with related legal text. The run is
fully seeded: same seed, same vectors, bit for bit.
"""

from pathlib import Path

import numpy as np

from statuteqa import CbowConfig, continue_training, split_statute, tokenize, train_cbow

DATA = Path(__file__).resolve().parents[1] / "data"

aux = split_statute((DATA / "aux_statute.txt").read_text(encoding="utf-8"))
target = split_statute((DATA / "sample_statute.txt").read_text(encoding="utf-8"))

config = CbowConfig(dim=32, window=5, epochs=60, seed=13)
model = train_cbow([tokenize(a.body) for a in aux], config)
print(f"stage 1: {len(model.words)} words from the auxiliary statute, "
      f"loss {model.loss_history[0]:.3f} -> {model.loss_history[-1]:.3f}")

continue_training(model, [tokenize(a.body) for a in target], config)
print(f"stage 2: vocabulary grew to {len(model.words)} words, "
      f"loss {model.loss_history[60]:.3f} -> {model.loss_history[-1]:.3f}\n")


def neighbours(word, k=4):
    v = model.vector(word)
    v = v / np.linalg.norm(v)
    sims = []
    for other in model.words:
        if other == word:
            continue
        u = model.vector(other)
        sims.append((float(v @ u / np.linalg.norm(u)), other))
    return sorted(sims, reverse=True)[:k]


for word in ("seller", "lease", "obligation"):
    near = ", ".join(f"{w} ({s:.2f})" for s, w in neighbours(word))
    print(f"nearest to {word!r}: {near}")
