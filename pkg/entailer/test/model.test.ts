import { describe, expect, it } from "vitest";
import { DEFAULT_ENCODER, EntailmentModel, encodeBatch } from "../src/model.js";
import { extractFeatures } from "../src/tokens.js";
import { loadVectors } from "../src/vectors.js";
import { TEN_PAIRS } from "./fixtures/pairs.js";

const FIXTURE = new URL("./fixtures/vectors.txt", import.meta.url).pathname;
const vectors = loadVectors(FIXTURE);

const SMALL = {
  ...DEFAULT_ENCODER,
  maxArticleTokens: 24,
  maxQueryTokens: 12,
};

describe("forward pass", () => {
  const features = TEN_PAIRS.slice(0, 4).map((p) =>
    extractFeatures(p.query, p.article),
  );
  const model = new EntailmentModel(SMALL, 42);
  const batch = encodeBatch(features, vectors, SMALL);
  const out = model.forward(batch, false);

  it("produces one probability per pair, strictly inside (0, 1)", () => {
    expect(out.prob.shape).toEqual([4, 1]);
    for (const p of out.prob.dataSync()) {
      expect(p).toBeGreaterThan(0);
      expect(p).toBeLessThan(1);
    }
  });

  it("attention shape is [batch, maxQuery, maxArticle]", () => {
    expect(out.attention.shape).toEqual([4, SMALL.maxQueryTokens, SMALL.maxArticleTokens]);
  });

  it("attention rows are stochastic over real article tokens", () => {
    const attn = out.attention.arraySync() as number[][][];
    features.forEach((f, i) => {
      const aLen = f.articleTokens.length;
      for (let r = 0; r < Math.min(f.queryTokens.length, SMALL.maxQueryTokens); r++) {
        const realMass = attn[i][r].slice(0, aLen).reduce((a, b) => a + b, 0);
        expect(Math.abs(realMass - 1)).toBeLessThan(1e-5);
        // padded article positions get no mass
        const padMass = attn[i][r].slice(aLen).reduce((a, b) => a + b, 0);
        expect(padMass).toBeLessThan(1e-6);
      }
    });
  });

  it("pair context vector is 2 sides x 2 directions x hidden wide", () => {
    // observable as the input dimension of the first classifier layer
    const firstDenseKernel = model
      .weights()
      .find(
        (w) =>
          w.shape.length === 2 &&
          w.shape[0] === 4 * SMALL.hidden &&
          w.shape[1] === SMALL.classifierUnits[0],
      );
    expect(firstDenseKernel).toBeDefined();
    expect(firstDenseKernel!.shape).toEqual([400, SMALL.classifierUnits[0]]);
  });

  it("identical seeds build identical models", () => {
    const twin = new EntailmentModel(SMALL, 42);
    const twinOut = twin.forward(batch, false);
    expect(Array.from(twinOut.prob.dataSync())).toEqual(
      Array.from(out.prob.dataSync()),
    );
  });

  it("different seeds build different models", () => {
    const other = new EntailmentModel(SMALL, 43);
    const otherOut = other.forward(batch, false);
    expect(Array.from(otherOut.prob.dataSync())).not.toEqual(
      Array.from(out.prob.dataSync()),
    );
  });
});
