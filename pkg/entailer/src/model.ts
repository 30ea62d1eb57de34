/**
 * Entailment network: two stacked bidirectional LSTM encoders (article
 * side carries four extra match features per token), scaled dot-product
 * attention from query states over article states before the final
 * encoder layer, and a ReLU classifier stack ending in a sigmoid.
 *
 * The article and query context vectors are each 2 directions x hidden
 * units wide, so the concatenated pair representation has
 * 2 sides x 2 directions x hidden dimensions.
 */

import * as tf from "@tensorflow/tfjs";
import type { PairFeatures } from "./tokens.js";
import type { WordVectors } from "./vectors.js";

export interface EncoderSpec {
  lstmLayers: number;
  hidden: number;
  dropout: number;
  classifierUnits: number[];
  maxArticleTokens: number;
  maxQueryTokens: number;
}

export const DEFAULT_ENCODER: EncoderSpec = {
  lstmLayers: 3,
  hidden: 100,
  dropout: 0.2,
  classifierUnits: [200, 100, 50, 25],
  maxArticleTokens: 256,
  maxQueryTokens: 64,
};

export const ARTICLE_EXTRA_FEATURES = 4; // exact, lower, lemma, norm tf

export interface EncodedBatch {
  articleX: tf.Tensor3D;   // [b, maxA, dim + 4]
  queryX: tf.Tensor3D;     // [b, maxQ, dim]
  articleMask: tf.Tensor2D; // [b, maxA] 1 on real tokens
  articleLast: tf.Tensor2D; // [b, maxA] one-hot of last real index
  queryLast: tf.Tensor2D;   // [b, maxQ]
  labels?: tf.Tensor2D;     // [b, 1]
}

/** Pack feature structs into padded, masked tensors. */
export function encodeBatch(
  pairs: PairFeatures[],
  vectors: WordVectors,
  spec: EncoderSpec,
  labels?: number[],
): EncodedBatch {
  const dim = vectors.dim;
  const b = pairs.length;
  const maxA = spec.maxArticleTokens;
  const maxQ = spec.maxQueryTokens;
  const articleX = new Float32Array(b * maxA * (dim + ARTICLE_EXTRA_FEATURES));
  const queryX = new Float32Array(b * maxQ * dim);
  const articleMask = new Float32Array(b * maxA);
  const articleLast = new Float32Array(b * maxA);
  const queryLast = new Float32Array(b * maxQ);

  pairs.forEach((pair, i) => {
    const aLen = Math.min(pair.articleTokens.length, maxA);
    const qLen = Math.min(pair.queryTokens.length, maxQ);
    for (let t = 0; t < aLen; t++) {
      const base = (i * maxA + t) * (dim + ARTICLE_EXTRA_FEATURES);
      articleX.set(vectors.vector(pair.articleTokens[t]), base);
      articleX[base + dim] = pair.exactMatch[t];
      articleX[base + dim + 1] = pair.lowerMatch[t];
      articleX[base + dim + 2] = pair.lemmaMatch[t];
      articleX[base + dim + 3] = pair.normTf[t];
      articleMask[i * maxA + t] = 1;
    }
    articleLast[i * maxA + aLen - 1] = 1;
    for (let t = 0; t < qLen; t++) {
      queryX.set(vectors.vector(pair.queryTokens[t]), (i * maxQ + t) * dim);
    }
    queryLast[i * maxQ + qLen - 1] = 1;
  });

  return {
    articleX: tf.tensor3d(articleX, [b, maxA, dim + ARTICLE_EXTRA_FEATURES]),
    queryX: tf.tensor3d(queryX, [b, maxQ, dim]),
    articleMask: tf.tensor2d(articleMask, [b, maxA]),
    articleLast: tf.tensor2d(articleLast, [b, maxA]),
    queryLast: tf.tensor2d(queryLast, [b, maxQ]),
    labels: labels ? tf.tensor2d(labels, [labels.length, 1]) : undefined,
  };
}

export interface ForwardOutput {
  /** positive-class probability, [b, 1] */
  prob: tf.Tensor2D;
  /** pre-sigmoid logit, [b, 1] (stable loss target) */
  logit: tf.Tensor2D;
  /** row-stochastic attention over article positions, [b, maxQ, maxA] */
  attention: tf.Tensor3D;
}

export class EntailmentModel {
  readonly spec: EncoderSpec;
  readonly seed: number;
  private articleLstm: tf.layers.Layer[] = [];
  private queryLstm: tf.layers.Layer[] = [];
  private drops: tf.layers.Layer[] = [];
  private classifier: tf.layers.Layer[] = [];
  private out!: tf.layers.Layer;

  constructor(spec: EncoderSpec, seed: number) {
    this.spec = spec;
    this.seed = seed;
    let s = seed * 1000;
    const bilstm = () =>
      tf.layers.bidirectional({
        layer: tf.layers.lstm({
          units: spec.hidden,
          returnSequences: true,
          kernelInitializer: tf.initializers.glorotUniform({ seed: ++s }),
          // orthogonal init does a pure-JS QR, prohibitively slow at
          // hidden sizes around 100; seeded glorot keeps runs reproducible
          recurrentInitializer: tf.initializers.glorotUniform({ seed: ++s }),
        }) as tf.layers.RNN,
        mergeMode: "concat",
      });
    for (let i = 0; i < spec.lstmLayers; i++) {
      this.articleLstm.push(bilstm());
      this.queryLstm.push(bilstm());
      this.drops.push(tf.layers.dropout({ rate: spec.dropout, seed: ++s }));
      this.drops.push(tf.layers.dropout({ rate: spec.dropout, seed: ++s }));
    }
    for (const units of spec.classifierUnits) {
      this.classifier.push(
        tf.layers.dense({
          units,
          activation: "relu",
          kernelInitializer: tf.initializers.glorotUniform({ seed: ++s }),
        }),
      );
    }
    this.out = tf.layers.dense({
      units: 1,
      kernelInitializer: tf.initializers.glorotUniform({ seed: ++s }),
    });
  }

  forward(batch: EncodedBatch, training: boolean): ForwardOutput {
    return tf.tidy(() => {
      const n = this.spec.lstmLayers;
      let a = batch.articleX as tf.Tensor;
      let q = batch.queryX as tf.Tensor;
      // all layers but the last, on both sides
      for (let i = 0; i < n - 1; i++) {
        a = this.articleLstm[i].apply(a) as tf.Tensor;
        a = this.drops[2 * i].apply(a, { training }) as tf.Tensor;
        q = this.queryLstm[i].apply(q) as tf.Tensor;
        q = this.drops[2 * i + 1].apply(q, { training }) as tf.Tensor;
      }

      // scaled dot-product attention: query states over article states
      const scale = Math.sqrt(2 * this.spec.hidden);
      const scores = tf.matMul(q, a, false, true).div(scale); // [b, maxQ, maxA]
      const maskBias = batch.articleMask.sub(1).mul(1e9).expandDims(1);
      const attention = tf.softmax(scores.add(maskBias), -1) as tf.Tensor3D;
      const attended = tf.matMul(attention, a); // [b, maxQ, 2h]

      // final encoder layer; the query side consumes its states plus
      // what it attended to in the article
      a = this.articleLstm[n - 1].apply(a) as tf.Tensor;
      a = this.drops[2 * (n - 1)].apply(a, { training }) as tf.Tensor;
      q = this.queryLstm[n - 1].apply(
        tf.concat([q, attended], -1),
      ) as tf.Tensor;
      q = this.drops[2 * (n - 1) + 1].apply(q, { training }) as tf.Tensor;

      // context vectors: state at the last real token of each side
      const aCtx = tf.matMul(batch.articleLast.expandDims(1), a).squeeze([1]);
      const qCtx = tf.matMul(batch.queryLast.expandDims(1), q).squeeze([1]);
      let h = tf.concat([aCtx, qCtx], -1); // [b, 4h]

      for (const dense of this.classifier) {
        h = dense.apply(h) as tf.Tensor;
      }
      const logit = this.out.apply(h) as tf.Tensor2D;
      const prob = tf.sigmoid(logit) as tf.Tensor2D;
      return { prob, logit, attention };
    });
  }

  /** All trainable weights, in a stable order. */
  weights(): tf.Tensor[] {
    return this.allLayers().flatMap((l) => l.getWeights());
  }

  setWeights(tensors: tf.Tensor[]): void {
    let cursor = 0;
    for (const layer of this.allLayers()) {
      const count = layer.getWeights().length;
      layer.setWeights(tensors.slice(cursor, cursor + count));
      cursor += count;
    }
    if (cursor !== tensors.length) {
      throw new Error(`weight count mismatch: used ${cursor} of ${tensors.length}`);
    }
  }

  private allLayers(): tf.layers.Layer[] {
    return [
      ...this.articleLstm,
      ...this.queryLstm,
      ...this.classifier,
      this.out,
    ];
  }
}
