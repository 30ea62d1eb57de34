"""Retrieval and entailment metrics, plus report rendering.

All retrieval metrics are macro-averaged: each query contributes
equally regardless of how many documents it retrieved or how many gold
articles it carries. A query that retrieved nothing scores 0 precision
rather than being skipped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyRun, MissingLabel
from .fusion import FALLBACK_TIER, SOURCE_EMBEDDING, SOURCE_LEXICAL, FusionResult


@dataclass
class RetrievalMetrics:
    precision: float
    recall: float
    f2: float
    map: float | None = None
    r_at: dict[int, float] = field(default_factory=dict)
    macro: bool = True


@dataclass
class TierCoverageRow:
    """One (tier, source) row of the coverage table, percentages.

    ``coverage`` counts queries with at least one acceptance at this
    tier/source over all queries; ``coverage_docs`` is this row's share
    of all accepted documents. The query-based reading matches the
    magnitudes reported for the original system.
    """

    tier: str
    source: str
    n_docs: int
    coverage: float
    coverage_docs: float
    precision: float
    recall: float
    f2: float


def f2_measure(precision: float, recall: float) -> float:
    denom = 4.0 * precision + recall
    if denom == 0.0:
        return 0.0
    return 5.0 * precision * recall / denom


def per_query_prf2(retrieved: set[str], gold: set[str]) -> tuple[float, float, float]:
    """Precision, recall, F2 for one query. Gold must be non-empty."""
    if not gold:
        raise ValueError("gold set must be non-empty")
    hits = len(retrieved & gold)
    p = hits / len(retrieved) if retrieved else 0.0
    r = hits / len(gold)
    return p, r, f2_measure(p, r)


def macro_average(per_query: list[tuple[float, float, float]]) -> RetrievalMetrics:
    """Unweighted mean of per-query (P, R, F2) tuples."""
    if not per_query:
        raise EmptyRun("no queries to average")
    n = len(per_query)
    return RetrievalMetrics(
        precision=sum(t[0] for t in per_query) / n,
        recall=sum(t[1] for t in per_query) / n,
        f2=sum(t[2] for t in per_query) / n,
    )


def average_precision(ranking: list[str], gold: set[str]) -> float:
    if not gold:
        raise ValueError("gold set must be non-empty")
    hits = 0
    total = 0.0
    seen: set[str] = set()
    for i, article_id in enumerate(ranking, start=1):
        if article_id in gold and article_id not in seen:
            hits += 1
            total += hits / i
        seen.add(article_id)
    return total / len(gold)


def mean_average_precision(rankings: dict[str, list[str]],
                           gold: dict[str, set[str]]) -> float:
    if not rankings:
        raise EmptyRun("no queries")
    return sum(average_precision(r, gold[qid]) for qid, r in rankings.items()) / len(rankings)


def recall_at_k(rankings: dict[str, list[str]], gold: dict[str, set[str]],
                k: int) -> float:
    if not rankings:
        raise EmptyRun("no queries")
    total = 0.0
    for qid, ranking in rankings.items():
        g = gold[qid]
        if not g:
            raise ValueError(f"gold set for {qid!r} must be non-empty")
        total += len(set(ranking[:k]) & g) / len(g)
    return total / len(rankings)


def evaluate_run(retrieved: dict[str, set[str]], rankings: dict[str, list[str]],
                 gold: dict[str, set[str]], ks: tuple[int, ...] = (5, 10, 30)) -> RetrievalMetrics:
    """Assemble the full macro metric set for one retrieval run.

    Queries with empty gold are excluded from every average.
    """
    qids = [q for q in retrieved if gold.get(q)]
    if not qids:
        raise EmptyRun("no queries with gold annotations")
    per_query = [per_query_prf2(retrieved[q], gold[q]) for q in qids]
    metrics = macro_average(per_query)
    ranked = {q: rankings[q] for q in qids if q in rankings}
    if ranked:
        metrics.map = mean_average_precision(ranked, gold)
        metrics.r_at = {k: recall_at_k(ranked, gold, k) for k in ks}
    return metrics


TIER_ROW_ORDER = ["high", "medium", "low", FALLBACK_TIER]


def tier_coverage_report(fusion_results: dict[str, FusionResult],
                         gold: dict[str, set[str]]) -> list[TierCoverageRow]:
    """Document counts, coverage, and quality per (tier, source)."""
    n_queries = len(fusion_results)
    total_docs = sum(len(r.accepted) for r in fusion_results.values())
    tiers_present = TIER_ROW_ORDER + sorted(
        {e.tier for r in fusion_results.values() for e in r.accepted}
        - set(TIER_ROW_ORDER)
    )
    rows = []
    for tier in tiers_present:
        for source in (SOURCE_LEXICAL, SOURCE_EMBEDDING):
            per_query_sets = {
                qid: {e.article_id for e in res.accepted
                      if e.tier == tier and e.source == source}
                for qid, res in fusion_results.items()
            }
            covered = {q for q, s in per_query_sets.items() if s}
            n_docs = sum(len(s) for s in per_query_sets.values())
            scored = [
                per_query_prf2(per_query_sets[q], gold[q])
                for q in covered if gold.get(q)
            ]
            if scored:
                m = macro_average(scored)
                p, r, f2 = m.precision, m.recall, m.f2
            else:
                p = r = f2 = 0.0
            rows.append(TierCoverageRow(
                tier=tier,
                source=source,
                n_docs=n_docs,
                coverage=100.0 * len(covered) / n_queries if n_queries else 0.0,
                coverage_docs=100.0 * n_docs / total_docs if total_docs else 0.0,
                precision=100.0 * p,
                recall=100.0 * r,
                f2=100.0 * f2,
            ))
    return rows


def entailment_accuracy(decisions: dict[str, str],
                        labels: dict[str, bool]) -> float:
    """Fraction of decisions matching the gold labels."""
    if not decisions:
        raise EmptyRun("no decisions")
    correct = 0
    for qid, label in decisions.items():
        if qid not in labels:
            raise MissingLabel(qid)
        correct += int((label == "YES") == labels[qid])
    return correct / len(decisions)


# ---------------------------------------------------------------------------
# Report rendering: TSV plus a Markdown mirror, percentages to one decimal
# ---------------------------------------------------------------------------


def _pct(x: float) -> str:
    return f"{100.0 * x:.1f}"


def render_retrieval_tsv(metrics: RetrievalMetrics) -> str:
    lines = ["metric\tvalue_pct"]
    lines.append(f"F2\t{_pct(metrics.f2)}")
    lines.append(f"P\t{_pct(metrics.precision)}")
    lines.append(f"R\t{_pct(metrics.recall)}")
    if metrics.map is not None:
        lines.append(f"MAP\t{_pct(metrics.map)}")
    for k in sorted(metrics.r_at):
        lines.append(f"R@{k}\t{_pct(metrics.r_at[k])}")
    return "\n".join(lines) + "\n"


def render_retrieval_markdown(metrics: RetrievalMetrics) -> str:
    rows = [("F2", metrics.f2), ("P", metrics.precision), ("R", metrics.recall)]
    if metrics.map is not None:
        rows.append(("MAP", metrics.map))
    rows += [(f"R@{k}", v) for k, v in sorted(metrics.r_at.items())]
    out = ["| Metric | Value |", "| --- | ---: |"]
    out += [f"| {name} | {_pct(v)} |" for name, v in rows]
    return "\n".join(out) + "\n"


def render_tier_tsv(rows: list[TierCoverageRow]) -> str:
    lines = ["tier\tsource\tn_docs\tcoverage_queries\tcoverage_docs\tP\tR\tF2"]
    for r in rows:
        lines.append(
            f"{r.tier}\t{r.source}\t{r.n_docs}\t{r.coverage:.1f}\t"
            f"{r.coverage_docs:.1f}\t{r.precision:.1f}\t{r.recall:.1f}\t{r.f2:.1f}"
        )
    return "\n".join(lines) + "\n"


def render_tier_markdown(rows: list[TierCoverageRow]) -> str:
    out = [
        "| Tier | Source | N | C | P | R | F2 |",
        "| --- | --- | ---: | ---: | ---: | ---: | ---: |",
    ]
    for r in rows:
        out.append(
            f"| {r.tier} | {r.source} | {r.n_docs} | {r.coverage:.1f} "
            f"| {r.precision:.1f} | {r.recall:.1f} | {r.f2:.1f} |"
        )
    return "\n".join(out) + "\n"


def render_entailment_tsv(accuracy: float, baseline: float | None = None) -> str:
    lines = ["metric\tvalue_pct", f"A\t{_pct(accuracy)}"]
    if baseline is not None:
        lines.append(f"A_baseline\t{_pct(baseline)}")
    return "\n".join(lines) + "\n"


def write_report(text: str, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
