/**
 * Dataset assembly from the retrieval package's file formats, plus the
 * vote JSONL and attention JSON outputs consumed downstream.
 *
 * Corpus JSONL: {"id","title","body","ordinal"}; query JSONL:
 * {"qid","text","gold":[ids],"label":bool}. The pair for a query is its
 * statement against the concatenated bodies of its gold articles.
 * Votes: {"qid","members":[{"id","p_pos"}]} -- one line per query,
 * bit-compatible with the decision gate's reader.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import type { LabeledPair } from "./train.js";

export interface MemberVote {
  id: string;
  p_pos: number;
}

export interface Vote {
  qid: string;
  members: MemberVote[];
}

export interface AttentionExport {
  qid: string;
  q_tokens: string[];
  a_tokens: string[];
  matrix: number[][];
}

export function loadCorpusBodies(corpusJsonl: string): Map<string, string> {
  const bodies = new Map<string, string>();
  for (const line of readFileSync(corpusJsonl, "utf-8").split("\n")) {
    if (!line.trim()) continue;
    const rec = JSON.parse(line) as { id: string; body: string };
    bodies.set(rec.id, rec.body);
  }
  return bodies;
}

export interface QueryRow {
  qid: string;
  text: string;
  gold: string[];
  label?: boolean;
}

export function loadQueryRows(queriesJsonl: string): QueryRow[] {
  const rows: QueryRow[] = [];
  for (const line of readFileSync(queriesJsonl, "utf-8").split("\n")) {
    if (!line.trim()) continue;
    const rec = JSON.parse(line) as {
      qid: string;
      text: string;
      gold?: string[];
      label?: boolean;
    };
    rows.push({
      qid: rec.qid,
      text: rec.text,
      gold: rec.gold ?? [],
      label: rec.label,
    });
  }
  return rows;
}

/**
 * Build labeled pairs from the retrieval package's corpus and query
 * files. Queries without gold articles have no article side and are
 * skipped; queries without labels get label=false placeholders and
 * should only be used for prediction.
 */
export function buildPairs(
  corpusJsonl: string,
  queriesJsonl: string,
): LabeledPair[] {
  const bodies = loadCorpusBodies(corpusJsonl);
  const pairs: LabeledPair[] = [];
  for (const row of loadQueryRows(queriesJsonl)) {
    const gold = row.gold.filter((id) => bodies.has(id)).sort();
    if (gold.length === 0) continue;
    pairs.push({
      qid: row.qid,
      query: row.text,
      article: gold.map((id) => bodies.get(id)!).join("\n"),
      label: row.label ?? false,
    });
  }
  return pairs;
}

export function writeVotes(path: string, votes: Vote[]): void {
  const lines = votes
    .slice()
    .sort((a, b) => a.qid.localeCompare(b.qid))
    .map((v) => JSON.stringify(v));
  writeFileSync(path, lines.join("\n") + "\n");
}

export function writeAttentionExports(
  dir: string,
  exports_: AttentionExport[],
): string[] {
  mkdirSync(dir, { recursive: true });
  const written: string[] = [];
  for (const exp of exports_) {
    const path = join(dir, `${exp.qid.replace(/[^A-Za-z0-9_-]/g, "_")}.json`);
    writeFileSync(path, JSON.stringify(exp) + "\n");
    written.push(path);
  }
  return written;
}
