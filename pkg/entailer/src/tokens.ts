/**
 * Tokenization and per-token match features for query/article pairs.
 *
 * The three match flags form an implication chain by construction:
 * a surface-form match implies a lowercase match, which implies a
 * matching canonical stem.
 */

const WORD_RE = /[\p{L}\p{N}_]+(?:-[\p{L}\p{N}_]+)*/gu;

export interface Tokenized {
  /** lowercased tokens */
  tokens: string[];
  /** original surface forms, parallel to tokens */
  surfaces: string[];
}

export function tokenize(text: string): Tokenized {
  const surfaces = text.match(WORD_RE) ?? [];
  return { surfaces, tokens: surfaces.map((s) => s.toLowerCase()) };
}

/**
 * Suffix canonicalizer for the lemma-match feature. Deliberately light:
 * the feature only needs related inflections ("seller"/"sellers",
 * "deliver"/"delivered") to collapse to a shared key, deterministically.
 */
export function stemLite(token: string): string {
  let w = token.toLowerCase();
  if (w.length <= 3 || !/^[a-z]+$/.test(w)) return w;
  if (w.endsWith("sses")) w = w.slice(0, -2);
  else if (w.endsWith("ies")) w = w.slice(0, -3) + "i";
  else if (!w.endsWith("ss") && w.endsWith("s")) w = w.slice(0, -1);
  if (w.length > 4 && w.endsWith("ing")) w = w.slice(0, -3);
  else if (w.length > 4 && w.endsWith("ed")) w = w.slice(0, -2);
  if (w.length > 4 && w.endsWith("e")) w = w.slice(0, -1);
  return w;
}

export interface PairFeatures {
  queryTokens: string[];
  querySurfaces: string[];
  articleTokens: string[];
  articleSurfaces: string[];
  /** per-article-token binary flags, parallel to articleTokens */
  exactMatch: number[];
  lowerMatch: number[];
  lemmaMatch: number[];
  /** tf / max tf within the article, in (0, 1] */
  normTf: number[];
}

export function extractFeatures(query: string, article: string): PairFeatures {
  const q = tokenize(query);
  const a = tokenize(article);
  if (q.tokens.length === 0 || a.tokens.length === 0) {
    throw new Error("extractFeatures requires non-empty texts");
  }
  const querySurfaceSet = new Set(q.surfaces);
  const queryLowerSet = new Set(q.tokens);
  const queryStemSet = new Set(q.tokens.map(stemLite));

  const tf = new Map<string, number>();
  for (const t of a.tokens) tf.set(t, (tf.get(t) ?? 0) + 1);
  const maxTf = Math.max(...tf.values());

  return {
    queryTokens: q.tokens,
    querySurfaces: q.surfaces,
    articleTokens: a.tokens,
    articleSurfaces: a.surfaces,
    exactMatch: a.surfaces.map((s) => (querySurfaceSet.has(s) ? 1 : 0)),
    lowerMatch: a.tokens.map((t) => (queryLowerSet.has(t) ? 1 : 0)),
    lemmaMatch: a.tokens.map((t) => (queryStemSet.has(stemLite(t)) ? 1 : 0)),
    normTf: a.tokens.map((t) => (tf.get(t) ?? 0) / maxTf),
  };
}

/**
 * Spelling surrogate for out-of-vocabulary tokens: if the token has no
 * pretrained vector and the correction dictionary knows it, substitute
 * the corrected spelling. In-vocabulary tokens always pass through.
 */
export function oovSurrogate(
  token: string,
  dictionary: Record<string, string>,
  hasVector: (t: string) => boolean,
): string {
  if (hasVector(token)) return token;
  return dictionary[token] ?? token;
}
