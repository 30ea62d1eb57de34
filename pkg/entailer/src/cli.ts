/**
 * Command front end.
 *
 *   train   --corpus c.jsonl --queries q.jsonl --vectors v.txt --out DIR
 *           [--epochs N --batch N --seeds 1,2 --val-year H28 --lr X]
 *   predict --corpus c.jsonl --queries q.jsonl --vectors v.txt
 *           --checkpoints DIR --out DIR
 *
 * train writes one checkpoint directory per ensemble member
 * (DIR/member-<seed>/{manifest.json,weights.bin}); predict writes
 * votes.jsonl, attention/<qid>.json and heatmaps/<qid>.svg.
 */

import { mkdirSync, readdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { writeHeatmaps } from "./heatmap.js";
import { buildPairs, writeAttentionExports, writeVotes } from "./io.js";
import { DEFAULT_ENCODER } from "./model.js";
import { predict } from "./predict.js";
import {
  DEFAULT_TRAIN,
  loadCheckpoint,
  saveCheckpoint,
  splitByYear,
  trainMember,
} from "./train.js";
import { loadVectors } from "./vectors.js";

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    if (!argv[i].startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`bad flag syntax near ${argv[i]}`);
    }
    flags.set(argv[i].slice(2), argv[i + 1]);
  }
  return flags;
}

function required(flags: Map<string, string>, name: string): string {
  const v = flags.get(name);
  if (!v) throw new Error(`missing required flag --${name}`);
  return v;
}

function cmdTrain(flags: Map<string, string>): void {
  const vectors = loadVectors(required(flags, "vectors"));
  const pairs = buildPairs(required(flags, "corpus"), required(flags, "queries"));
  const valYear = flags.get("val-year");
  const { train, validation } = valYear
    ? splitByYear(pairs, valYear)
    : { train: pairs, validation: [] };

  const encoderSpec = {
    ...DEFAULT_ENCODER,
    maxArticleTokens: Number(flags.get("max-article") ?? DEFAULT_ENCODER.maxArticleTokens),
    maxQueryTokens: Number(flags.get("max-query") ?? DEFAULT_ENCODER.maxQueryTokens),
    hidden: Number(flags.get("hidden") ?? DEFAULT_ENCODER.hidden),
  };
  const trainSpec = {
    ...DEFAULT_TRAIN,
    epochs: Number(flags.get("epochs") ?? DEFAULT_TRAIN.epochs),
    batchSize: Number(flags.get("batch") ?? DEFAULT_TRAIN.batchSize),
    learningRate: Number(flags.get("lr") ?? DEFAULT_TRAIN.learningRate),
    seeds: (flags.get("seeds") ?? "1,2").split(",").map(Number),
  };

  const outDir = required(flags, "out");
  mkdirSync(outDir, { recursive: true });
  const summary: Record<string, unknown>[] = [];
  for (const seed of trainSpec.seeds) {
    const member = trainMember(
      train, validation, encoderSpec, trainSpec, seed, vectors,
      (msg) => process.stderr.write(msg + "\n"),
    );
    saveCheckpoint(member.model, vectors.dim, join(outDir, `member-${seed}`));
    summary.push({
      seed,
      epochs: member.epochsUsed,
      finalLoss: member.history.at(-1)?.loss,
      trainAccuracy: member.history.at(-1)?.trainAccuracy,
      validationAccuracy: member.validationAccuracy,
    });
  }
  writeFileSync(
    join(outDir, "training.json"),
    JSON.stringify({ members: summary }, null, 2) + "\n",
  );
  process.stderr.write(`trained ${trainSpec.seeds.length} members into ${outDir}\n`);
}

function cmdPredict(flags: Map<string, string>): void {
  const vectors = loadVectors(required(flags, "vectors"));
  const pairs = buildPairs(required(flags, "corpus"), required(flags, "queries"));
  const checkpointRoot = required(flags, "checkpoints");
  const memberDirs = readdirSync(checkpointRoot)
    .filter((d) => d.startsWith("member-"))
    .sort();
  if (memberDirs.length === 0) {
    throw new Error(`no member-* checkpoints under ${checkpointRoot}`);
  }
  const models = memberDirs.map(
    (d) => loadCheckpoint(join(checkpointRoot, d)).model,
  );

  const outDir = required(flags, "out");
  mkdirSync(outDir, { recursive: true });
  const { votes, attention } = predict(models, pairs, vectors);
  writeVotes(join(outDir, "votes.jsonl"), votes);
  writeAttentionExports(join(outDir, "attention"), attention);
  writeHeatmaps(join(outDir, "heatmaps"), attention);
  process.stderr.write(
    `wrote ${votes.length} votes from ${models.length} members to ${outDir}\n`,
  );
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    const flags = parseFlags(rest);
    if (command === "train") cmdTrain(flags);
    else if (command === "predict") cmdPredict(flags);
    else {
      process.stderr.write("usage: entailer {train|predict} --flags...\n");
      return 2;
    }
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

process.exit(main(process.argv.slice(2)));
