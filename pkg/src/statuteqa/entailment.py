"""Entailment decisions: exact-match short circuit, then ensemble voting.

A query whose normalized token sequence occurs verbatim inside an
article is answered YES before any classifier is consulted. Otherwise
the ensemble's per-member positive-class probabilities decide: members
agree -> their shared answer; members disagree -> YES only when the
most confident approving member clears the approval threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .analysis import AnalyzerConfig, tokenize
from .corpus import Article, QueryRecord
from .errors import MissingVote, ParseError

YES = "YES"
NO = "NO"

RULE_EXACT = "exact"
RULE_UNANIMOUS = "unanimous"
RULE_THRESHOLD = "threshold"
RULE_BASELINE = "baseline"


@dataclass
class EntailmentVote:
    """Positive-class probability per ensemble member for one query."""

    qid: str
    member_probs: list[float]
    member_ids: list[str]

    def __post_init__(self):
        if len(self.member_probs) != len(self.member_ids):
            raise ValueError("member_probs and member_ids must be parallel")
        if not self.member_probs:
            raise ValueError(f"vote for {self.qid!r} has no members")
        if any(not 0.0 <= p <= 1.0 for p in self.member_probs):
            raise ValueError(f"vote for {self.qid!r} has probability outside [0, 1]")


@dataclass(frozen=True)
class GateConfig:
    """Approval threshold applied to the most confident approving member."""

    approve_threshold: float = 0.53
    analyzer: AnalyzerConfig = field(default_factory=AnalyzerConfig)

    def __post_init__(self):
        if not 0.5 < self.approve_threshold <= 1.0:
            raise ValueError("approve_threshold must be in (0.5, 1]")


@dataclass(frozen=True)
class Decision:
    label: str   # YES | NO
    rule: str    # exact | unanimous | threshold | baseline


def exact_match_gate(query: str, articles: list[Article],
                     analyzer: AnalyzerConfig = AnalyzerConfig()) -> bool:
    """True when the query's token sequence appears contiguously in an article.

    Containment is checked on normalized tokens, so case and punctuation
    differences do not defeat the gate. An empty token sequence defers.
    """
    needle = tokenize(query, analyzer).tokens
    if not needle:
        return False
    n = len(needle)
    for article in articles:
        hay = tokenize(article.body, analyzer).tokens
        for start in range(len(hay) - n + 1):
            if hay[start:start + n] == needle:
                return True
    return False


def ensemble_decide(vote: EntailmentVote, config: GateConfig = GateConfig()) -> Decision:
    """Vote combination. A member approves at probability >= 0.5."""
    approving = [p for p in vote.member_probs if p >= 0.5]
    if len(approving) == len(vote.member_probs):
        return Decision(YES, RULE_UNANIMOUS)
    if not approving:
        return Decision(NO, RULE_UNANIMOUS)
    if max(approving) > config.approve_threshold:
        return Decision(YES, RULE_THRESHOLD)
    return Decision(NO, RULE_THRESHOLD)


def baseline_negative(queries: list[QueryRecord]) -> list[Decision]:
    """The always-NO baseline."""
    return [Decision(NO, RULE_BASELINE) for _ in queries]


def run_entailment(queries: list[QueryRecord], articles: list[Article],
                   votes: dict[str, EntailmentVote],
                   config: GateConfig = GateConfig()) -> dict[str, Decision]:
    """Exact match first; ensemble on the rest. MissingVote if neither applies."""
    decisions: dict[str, Decision] = {}
    for q in queries:
        if exact_match_gate(q.text, articles, config.analyzer):
            decisions[q.qid] = Decision(YES, RULE_EXACT)
            continue
        vote = votes.get(q.qid)
        if vote is None:
            raise MissingVote(q.qid)
        decisions[q.qid] = ensemble_decide(vote, config)
    return decisions


# ---------------------------------------------------------------------------
# Vote file IO: JSONL {"qid", "members": [{"id", "p_pos"}]}
# ---------------------------------------------------------------------------


def load_votes(path: str | Path) -> dict[str, EntailmentVote]:
    votes: dict[str, EntailmentVote] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(str(exc), record=i) from exc
            if "qid" not in rec or "members" not in rec:
                raise ParseError("vote needs 'qid' and 'members'", record=i)
            qid = str(rec["qid"])
            if qid in votes:
                raise ParseError(f"duplicate vote for qid {qid!r}", record=i)
            members = rec["members"]
            try:
                vote = EntailmentVote(
                    qid=qid,
                    member_probs=[float(m["p_pos"]) for m in members],
                    member_ids=[str(m["id"]) for m in members],
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"malformed members: {exc}", record=i) from exc
            votes[qid] = vote
    return votes


def save_votes(votes: dict[str, EntailmentVote], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for qid in sorted(votes):
            v = votes[qid]
            rec = {
                "qid": v.qid,
                "members": [
                    {"id": mid, "p_pos": p}
                    for mid, p in zip(v.member_ids, v.member_probs)
                ],
            }
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
