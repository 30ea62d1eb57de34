"""Exact-match gate, ensemble voting, and the decision pipeline."""

import random

import pytest

from statuteqa.analysis import AnalyzerConfig, tokenize
from statuteqa.corpus import Article, QueryRecord
from statuteqa.entailment import (
    Decision,
    EntailmentVote,
    GateConfig,
    baseline_negative,
    ensemble_decide,
    exact_match_gate,
    load_votes,
    run_entailment,
    save_votes,
)
from statuteqa.errors import MissingVote, ParseError


def _article(body, ordinal=0):
    return Article(id=f"Article {ordinal + 1}", title=None, body=body,
                   ordinal=ordinal)


def _vote(probs):
    return EntailmentVote(qid="q", member_probs=list(probs),
                          member_ids=[f"m{i}" for i in range(len(probs))])


class TestExactMatchGate:
    ARTICLES = [
        _article("The exercise of rights must be done in good faith. No abuse "
                 "of rights is permitted.", 0),
        _article("A contract of guarantee must be made in writing.", 1),
    ]

    def test_verbatim_copy_fires(self):
        assert exact_match_gate("No abuse of rights is permitted.", self.ARTICLES)

    def test_shared_words_but_not_sequence_defers(self):
        assert not exact_match_gate("rights of abuse permitted", self.ARTICLES)

    def test_case_and_punctuation_insensitive(self):
        assert exact_match_gate("no ABUSE of rights -- is permitted!", self.ARTICLES)

    def test_independent_substring_oracle(self):
        """Cross-check containment with an unrelated string-based search."""
        queries = [
            "must be made in writing",
            "guarantee must be made",
            "made writing in",
            "the exercise of rights must be done",
            "rights must be done in bad faith",
        ]
        for q in queries:
            got = exact_match_gate(q, self.ARTICLES)
            needle = " ".join(tokenize(q).tokens)
            expected = any(
                f" {needle} " in f" {' '.join(tokenize(a.body).tokens)} "
                for a in self.ARTICLES
            )
            assert got == expected, q

    def test_empty_query_defers(self):
        assert not exact_match_gate("?!", self.ARTICLES)

    def test_whole_article_matches_itself(self, sample_corpus):
        for article in list(sample_corpus)[:3]:
            assert exact_match_gate(article.body, list(sample_corpus))


class TestEnsembleDecide:
    def test_paper_spot_checks(self):
        """One approver at 0.54 clears the 53% bar; 0.52 does not."""
        assert ensemble_decide(_vote([0.54, 0.40])).label == "YES"
        assert ensemble_decide(_vote([0.52, 0.40])).label == "NO"

    def test_unanimous(self):
        assert ensemble_decide(_vote([0.9, 0.9])) == Decision("YES", "unanimous")
        assert ensemble_decide(_vote([0.1, 0.2])) == Decision("NO", "unanimous")

    def test_disagreement_rule_tag(self):
        assert ensemble_decide(_vote([0.54, 0.40])).rule == "threshold"

    def test_exact_threshold_rejects(self):
        # strictly-greater-than comparison
        assert ensemble_decide(_vote([0.53, 0.40])).label == "NO"

    def test_half_counts_as_approving(self):
        # both members approve at exactly 0.5: unanimous YES
        assert ensemble_decide(_vote([0.5, 0.5])) == Decision("YES", "unanimous")

    def test_max_over_approvers(self):
        decision = ensemble_decide(_vote([0.51, 0.90, 0.10]))
        assert decision.label == "YES"

    def test_threshold_one_requires_unanimity(self):
        config = GateConfig(approve_threshold=1.0)
        rng = random.Random(4)
        for _ in range(200):
            probs = [rng.random() for _ in range(rng.randint(2, 5))]
            decision = ensemble_decide(_vote(probs), config)
            approving = [p for p in probs if p >= 0.5]
            if 0 < len(approving) < len(probs):
                assert decision.label == "NO"

    def test_monotone_in_threshold(self):
        """Raising the approval threshold never flips NO to YES."""
        rng = random.Random(8)
        for _ in range(1000):
            probs = [rng.random() for _ in range(rng.randint(1, 5))]
            lo = rng.uniform(0.501, 0.99)
            hi = rng.uniform(lo, 1.0)
            d_lo = ensemble_decide(_vote(probs), GateConfig(approve_threshold=lo))
            d_hi = ensemble_decide(_vote(probs), GateConfig(approve_threshold=hi))
            if d_lo.label == "NO":
                assert d_hi.label == "NO"

    def test_vote_validation(self):
        with pytest.raises(ValueError):
            EntailmentVote(qid="q", member_probs=[1.2], member_ids=["m"])
        with pytest.raises(ValueError):
            EntailmentVote(qid="q", member_probs=[], member_ids=[])
        with pytest.raises(ValueError):
            EntailmentVote(qid="q", member_probs=[0.5], member_ids=[])

    def test_gate_config_validation(self):
        with pytest.raises(ValueError):
            GateConfig(approve_threshold=0.5)
        with pytest.raises(ValueError):
            GateConfig(approve_threshold=1.1)


class TestBaseline:
    def test_all_no(self):
        queries = [QueryRecord(qid=f"q{i}", text="t") for i in range(7)]
        decisions = baseline_negative(queries)
        assert len(decisions) == 7
        assert all(d == Decision("NO", "baseline") for d in decisions)

    def test_empty(self):
        assert baseline_negative([]) == []


class TestRunEntailment:
    def test_gate_precedes_contradicting_vote(self, sample_corpus):
        queries = [QueryRecord(qid="q1", text=sample_corpus[0].body)]
        votes = {"q1": EntailmentVote("q1", [0.1], ["m1"])}
        decisions = run_entailment(queries, list(sample_corpus), votes)
        assert decisions["q1"] == Decision("YES", "exact")

    def test_vote_decides_without_match(self, sample_corpus):
        queries = [QueryRecord(qid="q1", text="completely unrelated statement here")]
        votes = {"q1": EntailmentVote("q1", [0.6, 0.6], ["m1", "m2"])}
        decisions = run_entailment(queries, list(sample_corpus), votes)
        assert decisions["q1"].label == "YES"

    def test_missing_vote_raises(self, sample_corpus):
        queries = [QueryRecord(qid="q1", text="completely unrelated statement here")]
        with pytest.raises(MissingVote):
            run_entailment(queries, list(sample_corpus), {})

    def test_fixture_against_rule_script(self, sample_corpus, sample_queries,
                                         sample_votes):
        """Independent transliteration of the decision rules, all 20 qids."""
        decisions = run_entailment(sample_queries, list(sample_corpus),
                                   sample_votes)

        def oracle(query):
            qt = tokenize(query.text).tokens
            for article in sample_corpus:
                at = tokenize(article.body).tokens
                if any(at[i:i + len(qt)] == qt
                       for i in range(len(at) - len(qt) + 1)):
                    return "YES"
            probs = sample_votes[query.qid].member_probs
            ups = [p for p in probs if p >= 0.5]
            if len(ups) == len(probs):
                return "YES"
            if len(ups) == 0:
                return "NO"
            return "YES" if max(ups) > 0.53 else "NO"

        assert len(decisions) == 20
        for q in sample_queries:
            assert decisions[q.qid].label == oracle(q), q.qid

    def test_exact_match_invariant_to_votes(self, sample_corpus):
        """The gate decision cannot be altered by any vote contents."""
        query = QueryRecord(qid="q1", text=sample_corpus[2].body)
        for probs in ([0.0], [0.49, 0.48], [1.0, 0.0]):
            votes = {"q1": EntailmentVote("q1", list(probs),
                                          [f"m{i}" for i in range(len(probs))])}
            decisions = run_entailment([query], list(sample_corpus), votes)
            assert decisions["q1"] == Decision("YES", "exact")


class TestVoteIO:
    def test_round_trip(self, tmp_path, sample_votes):
        path = tmp_path / "votes.jsonl"
        save_votes(sample_votes, path)
        loaded = load_votes(path)
        assert set(loaded) == set(sample_votes)
        for qid, vote in sample_votes.items():
            assert loaded[qid].member_probs == vote.member_probs
            assert loaded[qid].member_ids == vote.member_ids

    def test_duplicate_qid_rejected(self, tmp_path):
        path = tmp_path / "votes.jsonl"
        line = '{"qid":"q1","members":[{"id":"m1","p_pos":0.5}]}\n'
        path.write_text(line + line, encoding="utf-8")
        with pytest.raises(ParseError):
            load_votes(path)

    def test_malformed_members_rejected(self, tmp_path):
        path = tmp_path / "votes.jsonl"
        path.write_text('{"qid":"q1","members":[{"id":"m1"}]}\n', encoding="utf-8")
        with pytest.raises(ParseError):
            load_votes(path)

    def test_shipped_votes_parse(self, sample_votes):
        assert len(sample_votes) == 20
        assert all(len(v.member_probs) == 2 for v in sample_votes.values())
