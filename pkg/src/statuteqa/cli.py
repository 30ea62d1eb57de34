"""Batch command-line front end for reproducible retrieval runs.

Commands compose through a run directory: ``index`` writes index
artifacts into ``--out``, ``train-embeddings`` adds a vector file,
``retrieve`` reads both and writes the run TSV, ``evaluate`` turns run
and decision files into reports. All randomness flows from ``--seed``;
repeating a command with identical inputs produces byte-identical
artifacts.

Exit codes: 0 success, 2 input error, 3 data-consistency error,
4 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import bm25, centroid, embedding, entailment, fusion, metrics
from .analysis import AnalyzerConfig, build_idf, tokenize
from .corpus import load_queries, load_statute_or_corpus, save_corpus_jsonl
from .errors import ConsistencyError, InputError, NoCandidates

log = logging.getLogger("statuteqa")

RUN_TSV = "run.tsv"
DECISIONS_TSV = "decisions.tsv"
VECTORS_TXT = "vectors.txt"
CORPUS_JSONL = "corpus.jsonl"
IDF_JSON = "idf.json"


def _require_exists(path: str | Path, what: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise InputError(f"{what} path does not exist: {p}")
    return p


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(_require_exists(path, "config"), "r", encoding="utf-8") as fh:
        return json.load(fh)


def _analyzer_from(config: dict) -> AnalyzerConfig:
    return AnalyzerConfig.from_dict(config.get("analyzer", {}))


def _tiers_from(config: dict) -> list[fusion.TierConfig]:
    if "tiers" in config:
        return fusion.tiers_from_dict(config["tiers"])
    return fusion.default_tiers()


def _gate_from(config: dict, analyzer: AnalyzerConfig) -> entailment.GateConfig:
    gate = config.get("gate", {})
    return entailment.GateConfig(
        approve_threshold=float(gate.get("approve_threshold", 0.53)),
        analyzer=analyzer,
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_index(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    analyzer = _analyzer_from(config)
    params_cfg = config.get("bm25", {})
    params = bm25.Bm25Params(
        k1=float(params_cfg.get("k1", 1.2)), b=float(params_cfg.get("b", 0.75))
    )
    corpus = load_statute_or_corpus(_require_exists(args.corpus, "corpus"))
    index = bm25.build_index(corpus, analyzer, params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    bm25.save_index(index, out)
    save_corpus_jsonl(corpus, out / CORPUS_JSONL)
    idf = build_idf(corpus, analyzer)
    with open(out / IDF_JSON, "w", encoding="utf-8", newline="\n") as fh:
        json.dump({"doc_count": idf.doc_count, "df": idf.df},
                  fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
    log.info("indexed %d articles from %s", len(corpus), args.corpus)
    return 0


def _parse_stages(args: argparse.Namespace) -> list[tuple[Path, int]]:
    if args.stages:
        stages = []
        for part in args.stages.split(","):
            path, sep, epochs = part.rpartition(":")
            if not sep or not epochs.isdigit():
                raise InputError(f"bad --stages entry {part!r}, want path:epochs")
            stages.append((_require_exists(path, "stage corpus"), int(epochs)))
        return stages
    stages = []
    if args.aux_corpus:
        stages.append((_require_exists(args.aux_corpus, "aux corpus"), args.epochs))
    stages.append((_require_exists(args.corpus, "corpus"), args.epochs))
    return stages


def cmd_train_embeddings(args: argparse.Namespace) -> int:
    config = _load_config(args.config).get("embedding", {})
    analyzer = _analyzer_from(_load_config(args.config))
    cbow = embedding.CbowConfig(
        dim=args.dim or int(config.get("dim", 300)),
        window=args.window or int(config.get("window", 5)),
        epochs=args.epochs,
        learning_rate=float(config.get("learning_rate", 0.025)),
        negative=int(config.get("negative", 5)),
        min_count=int(config.get("min_count", 1)),
        seed=args.seed,
    )
    stages = _parse_stages(args)
    model = None
    for n, (path, epochs) in enumerate(stages, start=1):
        corpus = load_statute_or_corpus(path)
        texts = [tokenize(a.body, analyzer) for a in corpus]
        stage_cfg = embedding.CbowConfig(
            dim=cbow.dim, window=cbow.window, epochs=epochs,
            learning_rate=cbow.learning_rate, negative=cbow.negative,
            min_count=cbow.min_count, seed=cbow.seed,
        )
        log.info("stage %d/%d: training on %s for %d epochs",
                 n, len(stages), path, epochs)
        if model is None:
            model = embedding.train_cbow(texts, stage_cfg)
        else:
            model = embedding.continue_training(model, texts, stage_cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    embedding.save_vectors(model, out / VECTORS_TXT)
    log.info("wrote %d vectors (dim %d) to %s",
             len(model.words), model.dim, out / VECTORS_TXT)
    return 0


def cmd_retrieve(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    analyzer = _analyzer_from(config)
    tiers = _tiers_from(config)
    if args.tiers == "high-only":
        # restricted cascades drop the no-confidence fallback: it is
        # defined as "nothing accepted at high, medium or low"
        tiers, fallback = tiers[:1], False
    else:
        fallback = True

    out = Path(args.out)
    index = bm25.load_index(_require_exists(out, "run dir"))
    corpus = load_statute_or_corpus(
        _require_exists(args.corpus or out / CORPUS_JSONL, "corpus"))
    vectors_path = args.vectors or out / VECTORS_TXT
    model = embedding.load_vectors(_require_exists(vectors_path, "vectors"))
    idf = build_idf(corpus, analyzer)
    store = centroid.build_centroid_store(corpus, model, idf, analyzer)
    queries = load_queries(_require_exists(args.queries, "queries"),
                           format=args.format)

    lines = []
    for q in sorted(queries, key=lambda r: r.qid):
        stream = tokenize(q.text, analyzer)
        bm25_hits = bm25.search_bm25(index, stream, args.k)
        emb_hits = centroid.search_embedding(stream, store, model, idf, args.k)
        try:
            result = fusion.fuse(bm25_hits, emb_hits, max(len(stream), 1),
                                 tiers, fallback=fallback)
        except NoCandidates:
            log.warning("no candidates for %s; skipping", q.qid)
            continue
        for e in result.accepted:
            lines.append(f"{q.qid}\t{e.article_id}\t{e.tier}\t{e.source}\t{e.score:.6f}")

    with open(out / RUN_TSV, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("qid\tarticle_id\ttier\tsource\tscore\n")
        fh.write("\n".join(lines) + ("\n" if lines else ""))
    log.info("wrote %d result lines to %s", len(lines), out / RUN_TSV)
    return 0


def cmd_entail(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    analyzer = _analyzer_from(config)
    gate = _gate_from(config, analyzer)
    corpus = load_statute_or_corpus(_require_exists(args.corpus, "corpus"))
    queries = load_queries(_require_exists(args.queries, "queries"),
                           format=args.format)
    votes = entailment.load_votes(_require_exists(args.votes, "votes"))
    decisions = entailment.run_entailment(queries, list(corpus), votes, gate)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / DECISIONS_TSV, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("qid\tdecision\trule\n")
        for qid in sorted(decisions):
            d = decisions[qid]
            fh.write(f"{qid}\t{d.label}\t{d.rule}\n")
    log.info("wrote %d decisions to %s", len(decisions), out / DECISIONS_TSV)
    return 0


def _read_run_tsv(path: Path) -> dict[str, fusion.FusionResult]:
    results: dict[str, fusion.FusionResult] = {}
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline()
        if not header.startswith("qid\t"):
            raise InputError(f"{path} does not look like a run TSV")
        for line in fh:
            if not line.strip():
                continue
            qid, article_id, tier, source, score = line.rstrip("\n").split("\t")
            entry = fusion.FusionEntry(article_id, tier, source, float(score))
            if qid not in results:
                results[qid] = fusion.FusionResult(accepted=[], used_fallback=False)
            results[qid].accepted.append(entry)
            if tier == fusion.FALLBACK_TIER:
                results[qid].used_fallback = True
    return results


def _read_decisions_tsv(path: Path) -> dict[str, str]:
    decisions = {}
    with open(path, "r", encoding="utf-8") as fh:
        fh.readline()
        for line in fh:
            if not line.strip():
                continue
            qid, label, _rule = line.rstrip("\n").split("\t")
            decisions[qid] = label
    return decisions


def cmd_evaluate(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    queries = load_queries(_require_exists(args.gold, "gold"), format=args.format)
    gold = {q.qid: set(q.gold_article_ids) for q in queries}

    if args.run:
        results = _read_run_tsv(_require_exists(args.run, "run"))
        retrieved = {qid: {e.article_id for e in r.accepted}
                     for qid, r in results.items()}
        rankings = {qid: [e.article_id for e in r.accepted]
                    for qid, r in results.items()}
        m = metrics.evaluate_run(retrieved, rankings, gold)
        metrics.write_report(metrics.render_retrieval_tsv(m), out / "retrieval.tsv")
        metrics.write_report(metrics.render_retrieval_markdown(m), out / "retrieval.md")
        rows = metrics.tier_coverage_report(results, gold)
        metrics.write_report(metrics.render_tier_tsv(rows), out / "tiers.tsv")
        metrics.write_report(metrics.render_tier_markdown(rows), out / "tiers.md")
        log.info("retrieval F2=%.4f P=%.4f R=%.4f", m.f2, m.precision, m.recall)

    if args.decisions:
        decided = _read_decisions_tsv(_require_exists(args.decisions, "decisions"))
        labels = {q.qid: q.gold_entailment for q in queries
                  if q.gold_entailment is not None}
        accuracy = metrics.entailment_accuracy(decided, labels)
        baseline_dec = {qid: "NO" for qid in decided}
        baseline = metrics.entailment_accuracy(baseline_dec, labels)
        metrics.write_report(metrics.render_entailment_tsv(accuracy, baseline),
                             out / "entailment.tsv")
        log.info("entailment accuracy=%.4f baseline=%.4f", accuracy, baseline)
    return 0


# ---------------------------------------------------------------------------
# Argument wiring
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="statuteqa",
        description="statute retrieval and entailment runs",
    )
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--out", required=True, help="run directory")
        p.add_argument("--format", default="jsonl",
                       choices=["jsonl", "coliee-xml-subset"])

    p = sub.add_parser("index", help="build and persist the lexical index")
    common(p)
    p.add_argument("--corpus", required=True)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("train-embeddings", help="train CBOW vectors")
    common(p)
    p.add_argument("--corpus")
    p.add_argument("--aux-corpus", help="first-stage corpus, trained before --corpus")
    p.add_argument("--stages", help="explicit schedule: pathA:700,pathB:800")
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--window", type=int, default=None)
    p.set_defaults(func=cmd_train_embeddings)

    p = sub.add_parser("retrieve", help="hybrid retrieval with tier fusion")
    common(p)
    p.add_argument("--corpus", help="defaults to <out>/corpus.jsonl")
    p.add_argument("--vectors", help="defaults to <out>/vectors.txt")
    p.add_argument("--queries", required=True)
    p.add_argument("--k", type=int, default=30)
    p.add_argument("--tiers", default="all", choices=["all", "high-only"])
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("entail", help="entailment gate over votes")
    common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--votes", required=True)
    p.set_defaults(func=cmd_entail)

    p = sub.add_parser("evaluate", help="metric reports for run/decision files")
    common(p)
    p.add_argument("--run", help="run TSV from retrieve")
    p.add_argument("--gold", required=True, help="query JSONL with gold fields")
    p.add_argument("--decisions", help="decisions TSV from entail")
    p.set_defaults(func=cmd_evaluate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.command == "train-embeddings" and not (args.stages or args.corpus):
        log.error("train-embeddings needs --corpus or --stages")
        return 2
    if args.command == "evaluate" and not (args.run or args.decisions):
        log.error("evaluate needs --run and/or --decisions")
        return 2
    try:
        return args.func(args)
    except (InputError, FileNotFoundError) as exc:
        log.error("%s", exc)
        return 2
    except ConsistencyError as exc:
        log.error("%s", exc)
        return 3
    except Exception as exc:   # noqa: BLE001
        log.error("internal error: %s", exc)
        return 4


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
