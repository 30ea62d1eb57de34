/**
 * word2vec text-format reader: header "vocab_size dim", then one
 * "word v1 ... v_dim" line per row. This is the interchange format the
 * retrieval package emits, so its trained vectors plug in directly in
 * place of large general-purpose embeddings.
 */

import { readFileSync } from "node:fs";

export class WordVectors {
  readonly dim: number;
  private readonly index = new Map<string, number>();
  private readonly data: Float32Array;

  constructor(words: string[], dim: number, data: Float32Array) {
    this.dim = dim;
    this.data = data;
    words.forEach((w, i) => this.index.set(w, i));
  }

  has(word: string): boolean {
    return this.index.has(word);
  }

  get size(): number {
    return this.index.size;
  }

  /** Vector for the word, or zeros when out of vocabulary. */
  vector(word: string): Float32Array {
    const row = this.index.get(word);
    if (row === undefined) return new Float32Array(this.dim);
    return this.data.subarray(row * this.dim, (row + 1) * this.dim);
  }
}

export function loadVectors(path: string): WordVectors {
  const lines = readFileSync(path, "utf-8").split("\n").filter((l) => l.trim());
  if (lines.length === 0) throw new Error(`empty vector file: ${path}`);
  const header = lines[0].split(/\s+/);
  if (header.length !== 2) throw new Error(`bad header in ${path}`);
  const vocabSize = Number(header[0]);
  const dim = Number(header[1]);
  if (!Number.isInteger(vocabSize) || !Number.isInteger(dim)) {
    throw new Error(`bad header in ${path}`);
  }
  if (lines.length - 1 !== vocabSize) {
    throw new Error(
      `header declares ${vocabSize} rows, file has ${lines.length - 1}`,
    );
  }
  const words: string[] = [];
  const data = new Float32Array(vocabSize * dim);
  for (let i = 0; i < vocabSize; i++) {
    const fields = lines[i + 1].split(/\s+/);
    if (fields.length !== dim + 1) {
      throw new Error(`line ${i + 2}: expected word + ${dim} values`);
    }
    words.push(fields[0]);
    for (let j = 0; j < dim; j++) {
      const v = Number(fields[1 + j]);
      if (Number.isNaN(v)) throw new Error(`line ${i + 2}: non-numeric entry`);
      data[i * dim + j] = v;
    }
  }
  return new WordVectors(words, dim, data);
}
