"""Entailment decisions and the evaluation tables.

Decisions run in two stages. A query whose normalized token sequence
appears verbatim inside an article is YES immediately. Everything else
goes to the classifier ensemble: unanimous members win outright; on
disagreement the most confident approving member must clear 53%.
The always-NO baseline shows what any model has to beat.
"""

from pathlib import Path

from statuteqa import (
    baseline_negative,
    entailment_accuracy,
    evaluate_run,
    load_queries,
    load_votes,
    run_entailment,
    split_statute,
)
from statuteqa.metrics import render_retrieval_markdown

DATA = Path(__file__).resolve().parents[1] / "data"

corpus = split_statute((DATA / "sample_statute.txt").read_text(encoding="utf-8"))
queries = load_queries(DATA / "queries.jsonl")
votes = load_votes(DATA / "votes.jsonl")

decisions = run_entailment(queries, list(corpus), votes)

print("qid        decision  rule       gold")
for q in queries[:8]:
    d = decisions[q.qid]
    gold = "YES" if q.gold_entailment else "NO"
    flag = "" if (d.label == gold) else "   <- miss"
    print(f"{q.qid:<10} {d.label:<9} {d.rule:<10} {gold}{flag}")

labels = {q.qid: q.gold_entailment for q in queries}
accuracy = entailment_accuracy({q: d.label for q, d in decisions.items()}, labels)
base = baseline_negative(queries)
base_acc = entailment_accuracy(
    {q.qid: d.label for q, d in zip(queries, base)}, labels)
print(f"\nensemble accuracy {accuracy:.2%} vs always-NO baseline {base_acc:.2%}")

# Retrieval metrics use the same macro-averaged definitions as the
# competition tables: P, R, recall-weighted F2, MAP and recall at k.
gold_sets = {q.qid: set(q.gold_article_ids) for q in queries}
perfect = {qid: sorted(g) for qid, g in gold_sets.items()}
metrics = evaluate_run(
    {qid: set(r) for qid, r in perfect.items()}, perfect, gold_sets)
print("\na perfect run scores 100 everywhere:\n")
print(render_retrieval_markdown(metrics))
