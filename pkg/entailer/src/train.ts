/**
 * Member training: Adamax on sigmoid cross-entropy with global-norm
 * gradient clipping. One ensemble member is trained per seed; the seed
 * drives weight init, dropout, and batch shuffling, so a member is
 * reproducible from its seed alone.
 */

import * as tf from "@tensorflow/tfjs";
import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { EncodedBatch, EncoderSpec, EntailmentModel, encodeBatch } from "./model.js";
import { extractFeatures, PairFeatures } from "./tokens.js";
import type { WordVectors } from "./vectors.js";

export interface TrainSpec {
  epochs: number;
  batchSize: number;
  learningRate: number;
  clipNorm: number;
  seeds: number[];
  /** stop once training accuracy reaches this level (1.0 = perfect) */
  stopAtTrainAccuracy?: number;
}

export const DEFAULT_TRAIN: TrainSpec = {
  epochs: 100,
  batchSize: 20,
  learningRate: 0.002,
  clipNorm: 1.0,
  seeds: [1, 2],
};

export interface LabeledPair {
  qid: string;
  query: string;
  article: string;
  label: boolean;
}

export interface EpochStats {
  loss: number;
  trainAccuracy: number;
}

export interface TrainedMember {
  model: EntailmentModel;
  history: EpochStats[];
  epochsUsed: number;
  validationAccuracy: number | null;
}

/** Deterministic PRNG for batch shuffling (mulberry32). */
function rng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function shuffled<T>(items: T[], rand: () => number): T[] {
  const out = items.slice();
  for (let i = out.length - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1));
    [out[i], out[j]] = [out[j], out[i]];
  }
  return out;
}

function clipByGlobalNorm(
  grads: tf.NamedTensorMap,
  clipNorm: number,
): tf.NamedTensorMap {
  return tf.tidy(() => {
    const names = Object.keys(grads);
    const squares = names.map((n) => grads[n].square().sum());
    const globalNorm = tf.sqrt(tf.addN(squares));
    const scale = tf.minimum(
      tf.scalar(1.0),
      tf.scalar(clipNorm).div(globalNorm.add(1e-12)),
    );
    const clipped: tf.NamedTensorMap = {};
    for (const n of names) clipped[n] = grads[n].mul(scale);
    return clipped;
  });
}

function disposeBatch(batch: EncodedBatch): void {
  batch.articleX.dispose();
  batch.queryX.dispose();
  batch.articleMask.dispose();
  batch.articleLast.dispose();
  batch.queryLast.dispose();
  batch.labels?.dispose();
}

export function accuracy(
  model: EntailmentModel,
  features: PairFeatures[],
  labels: boolean[],
  vectors: WordVectors,
): number {
  const batch = encodeBatch(features, vectors, model.spec);
  const { prob, logit, attention } = model.forward(batch, false);
  const probs = prob.dataSync();
  logit.dispose();
  attention.dispose();
  prob.dispose();
  disposeBatch(batch);
  let correct = 0;
  probs.forEach((p, i) => {
    if ((p >= 0.5) === labels[i]) correct++;
  });
  return correct / labels.length;
}

export function trainMember(
  train: LabeledPair[],
  validation: LabeledPair[],
  encoderSpec: EncoderSpec,
  trainSpec: TrainSpec,
  seed: number,
  vectors: WordVectors,
  log: (msg: string) => void = () => {},
): TrainedMember {
  const model = new EntailmentModel(encoderSpec, seed);
  // the gradient tape only sees variables that already exist, so force
  // every layer to allocate its weights before the first batch
  buildLayers(model, vectors.dim);
  const optimizer = tf.train.adamax(trainSpec.learningRate);
  const rand = rng(seed * 7919 + 17);
  const features = train.map((p) => extractFeatures(p.query, p.article));
  const labels = train.map((p) => p.label);
  const valFeatures = validation.map((p) => extractFeatures(p.query, p.article));
  const valLabels = validation.map((p) => p.label);

  const history: EpochStats[] = [];
  let epochsUsed = 0;
  for (let epoch = 0; epoch < trainSpec.epochs; epoch++) {
    const order = shuffled([...features.keys()], rand);
    let lossSum = 0;
    let batches = 0;
    for (let start = 0; start < order.length; start += trainSpec.batchSize) {
      const idx = order.slice(start, start + trainSpec.batchSize);
      const batch = encodeBatch(
        idx.map((i) => features[i]),
        vectors,
        encoderSpec,
        idx.map((i) => (labels[i] ? 1 : 0)),
      );
      const { value, grads } = tf.variableGrads(() => {
        const { logit, prob, attention } = model.forward(batch, true);
        prob.dispose();
        attention.dispose();
        return tf.losses.sigmoidCrossEntropy(batch.labels!, logit) as tf.Scalar;
      });
      const clipped = clipByGlobalNorm(grads, trainSpec.clipNorm);
      optimizer.applyGradients(
        Object.entries(clipped).map(([name, tensor]) => ({ name, tensor })),
      );
      lossSum += value.dataSync()[0];
      batches++;
      value.dispose();
      Object.values(grads).forEach((g) => g.dispose());
      Object.values(clipped).forEach((g) => g.dispose());
      disposeBatch(batch);
    }
    const trainAccuracy = accuracy(model, features, labels, vectors);
    history.push({ loss: lossSum / batches, trainAccuracy });
    epochsUsed = epoch + 1;
    log(
      `seed ${seed} epoch ${epoch + 1}/${trainSpec.epochs} ` +
      `loss ${(lossSum / batches).toFixed(4)} acc ${trainAccuracy.toFixed(3)}`,
    );
    if (
      trainSpec.stopAtTrainAccuracy !== undefined &&
      trainAccuracy >= trainSpec.stopAtTrainAccuracy
    ) {
      break;
    }
  }

  const validationAccuracy = validation.length
    ? accuracy(model, valFeatures, valLabels, vectors)
    : null;
  return { model, history, epochsUsed, validationAccuracy };
}

/** Hold out every pair whose qid starts with the given exam-year prefix. */
export function splitByYear(
  pairs: LabeledPair[],
  yearPrefix: string,
): { train: LabeledPair[]; validation: LabeledPair[] } {
  return {
    train: pairs.filter((p) => !p.qid.startsWith(yearPrefix)),
    validation: pairs.filter((p) => p.qid.startsWith(yearPrefix)),
  };
}

// ---------------------------------------------------------------------------
// Checkpoints: manifest.json (spec, seed, shapes) + weights.bin (f32, LE)
// ---------------------------------------------------------------------------

export function saveCheckpoint(
  model: EntailmentModel,
  embeddingDim: number,
  dir: string,
): void {
  mkdirSync(dir, { recursive: true });
  const weights = model.weights();
  const shapes = weights.map((w) => w.shape);
  const chunks: Float32Array[] = weights.map(
    (w) => w.dataSync() as Float32Array,
  );
  const total = chunks.reduce((n, c) => n + c.length, 0);
  const flat = new Float32Array(total);
  let off = 0;
  for (const c of chunks) {
    flat.set(c, off);
    off += c.length;
  }
  writeFileSync(join(dir, "weights.bin"), Buffer.from(flat.buffer));
  writeFileSync(
    join(dir, "manifest.json"),
    JSON.stringify(
      { spec: model.spec, seed: model.seed, embeddingDim, shapes },
      null,
      2,
    ) + "\n",
  );
}

export function loadCheckpoint(dir: string): {
  model: EntailmentModel;
  embeddingDim: number;
} {
  const manifest = JSON.parse(
    readFileSync(join(dir, "manifest.json"), "utf-8"),
  ) as {
    spec: EncoderSpec;
    seed: number;
    embeddingDim: number;
    shapes: number[][];
  };
  const model = new EntailmentModel(manifest.spec, manifest.seed);
  buildLayers(model, manifest.embeddingDim);
  const raw = readFileSync(join(dir, "weights.bin"));
  const flat = new Float32Array(raw.buffer, raw.byteOffset, raw.length / 4);
  let off = 0;
  const tensors = manifest.shapes.map((shape) => {
    const size = shape.reduce((a, b) => a * b, 1);
    const t = tf.tensor(flat.slice(off, off + size), shape);
    off += size;
    return t;
  });
  model.setWeights(tensors);
  tensors.forEach((t) => t.dispose());
  return { model, embeddingDim: manifest.embeddingDim };
}

/** Run one dummy forward pass so every layer allocates its weights. */
function buildLayers(model: EntailmentModel, embeddingDim: number): void {
  const spec = model.spec;
  const dummy: EncodedBatch = {
    articleX: tf.zeros([1, spec.maxArticleTokens, embeddingDim + 4]),
    queryX: tf.zeros([1, spec.maxQueryTokens, embeddingDim]),
    articleMask: tf.ones([1, spec.maxArticleTokens]),
    articleLast: tf.oneHot([0], spec.maxArticleTokens).cast("float32") as tf.Tensor2D,
    queryLast: tf.oneHot([0], spec.maxQueryTokens).cast("float32") as tf.Tensor2D,
  };
  const out = model.forward(dummy, false);
  out.prob.dispose();
  out.logit.dispose();
  out.attention.dispose();
  disposeBatch(dummy);
}
