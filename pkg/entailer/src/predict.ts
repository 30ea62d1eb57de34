/**
 * Ensemble prediction: one positive-class probability per member per
 * query, plus the first member's attention matrix for inspection.
 */

import type { AttentionExport, Vote } from "./io.js";
import { EntailmentModel, encodeBatch } from "./model.js";
import { extractFeatures } from "./tokens.js";
import type { LabeledPair } from "./train.js";
import type { WordVectors } from "./vectors.js";

export interface PredictOutput {
  votes: Vote[];
  attention: AttentionExport[];
}

export function predict(
  models: EntailmentModel[],
  pairs: LabeledPair[],
  vectors: WordVectors,
): PredictOutput {
  if (models.length === 0) throw new Error("need at least one trained member");
  const spec = models[0].spec;
  const features = pairs.map((p) => extractFeatures(p.query, p.article));

  const memberProbs: Float32Array[] = [];
  let attentionRaw: Float32Array | null = null;
  for (const [m, model] of models.entries()) {
    const batch = encodeBatch(features, vectors, spec);
    const out = model.forward(batch, false);
    memberProbs.push(out.prob.dataSync() as Float32Array);
    if (m === 0) attentionRaw = out.attention.dataSync() as Float32Array;
    out.prob.dispose();
    out.logit.dispose();
    out.attention.dispose();
    batch.articleX.dispose();
    batch.queryX.dispose();
    batch.articleMask.dispose();
    batch.articleLast.dispose();
    batch.queryLast.dispose();
  }

  const votes: Vote[] = pairs.map((pair, i) => ({
    qid: pair.qid,
    members: models.map((model, m) => ({
      id: `seed-${model.seed}`,
      p_pos: Number(memberProbs[m][i].toFixed(6)),
    })),
  }));

  const attention: AttentionExport[] = pairs.map((pair, i) => {
    const f = features[i];
    const qLen = Math.min(f.queryTokens.length, spec.maxQueryTokens);
    const aLen = Math.min(f.articleTokens.length, spec.maxArticleTokens);
    const matrix: number[][] = [];
    for (let r = 0; r < qLen; r++) {
      const row: number[] = [];
      const base = (i * spec.maxQueryTokens + r) * spec.maxArticleTokens;
      for (let c = 0; c < aLen; c++) {
        row.push(attentionRaw![base + c]);
      }
      matrix.push(row);
    }
    return {
      qid: pair.qid,
      q_tokens: f.queryTokens.slice(0, qLen),
      a_tokens: f.articleTokens.slice(0, aLen),
      matrix,
    };
  });

  return { votes, attention };
}
