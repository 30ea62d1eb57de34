"""Tiered combination of lexical and embedding rankings.

Each confidence tier can accept the top embedding hit (similarity at or
above the tier floor) and the top lexical hit (score dominating the
runner-up AND exceeding the query length plus an offset). Tiers run
from strict to relaxed; each may add at most ``max_additional`` new
articles beyond what earlier tiers accepted. Embedding acceptances
outrank lexical ones inside a tier. If no tier accepts anything, the
top embedding hit is returned without confidence so the result is never
empty while any candidate exists.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bm25 import ScoredHit
from .errors import NoCandidates

SOURCE_EMBEDDING = "embedding"
SOURCE_LEXICAL = "lexical"
FALLBACK_TIER = "fallback"


@dataclass(frozen=True)
class TierConfig:
    """One confidence tier of the acceptance cascade."""

    name: str
    bm25_dominance: float     # top-1 must be >= this x runner-up
    bm25_floor_offset: float  # top-1 must exceed query_len + this
    emb_sim_min: float        # top-1 similarity floor
    max_additional: int       # cap on new articles this tier may add

    def __post_init__(self):
        if self.bm25_dominance < 1.0:
            raise ValueError("bm25_dominance must be >= 1")
        if not 0.0 <= self.emb_sim_min <= 1.0:
            raise ValueError("emb_sim_min must be in [0, 1]")
        if self.max_additional < 0:
            raise ValueError("max_additional must be >= 0")


def default_tiers() -> list[TierConfig]:
    """High tier straight from the tuned system; lower tiers relaxed."""
    return [
        TierConfig("high", 2.0, 20.0, 0.90, 2),
        TierConfig("medium", 1.5, 10.0, 0.80, 2),
        TierConfig("low", 1.2, 0.0, 0.70, 1),
    ]


def check_tier_order(tiers: list[TierConfig]) -> None:
    """Thresholds must relax (never tighten) from first to last tier."""
    for earlier, later in zip(tiers, tiers[1:]):
        if (later.bm25_dominance > earlier.bm25_dominance
                or later.bm25_floor_offset > earlier.bm25_floor_offset
                or later.emb_sim_min > earlier.emb_sim_min):
            raise ValueError(
                f"tier {later.name!r} is stricter than {earlier.name!r}"
            )


@dataclass(frozen=True)
class Acceptance:
    article_id: str
    source: str
    score: float


@dataclass(frozen=True)
class FusionEntry:
    article_id: str
    tier: str
    source: str
    score: float


@dataclass
class FusionResult:
    accepted: list[FusionEntry]
    used_fallback: bool

    def article_ids(self) -> list[str]:
        return [e.article_id for e in self.accepted]


def evaluate_tier(bm25_hits: list[ScoredHit], emb_hits: list[ScoredHit],
                  query_len: int, tier: TierConfig) -> list[Acceptance]:
    """Apply one tier's criteria to the two top-1 candidates.

    Embedding acceptance is listed first; an article accepted by both
    branches collapses to a single embedding-sourced entry.
    """
    if query_len < 1:
        raise ValueError("query_len must be >= 1")
    accepted: list[Acceptance] = []

    if emb_hits and emb_hits[0].score >= tier.emb_sim_min:
        top = emb_hits[0]
        accepted.append(Acceptance(top.article_id, SOURCE_EMBEDDING, top.score))

    if bm25_hits:
        s1 = bm25_hits[0].score
        if len(bm25_hits) >= 2:
            s2 = bm25_hits[1].score
            # a zero runner-up dominates trivially as long as top-1 scored
            dominance_ok = (s1 > 0.0) if s2 == 0.0 else (s1 >= tier.bm25_dominance * s2)
        else:
            dominance_ok = True   # a lone scoring article is maximally dominant
        floor_ok = s1 > query_len + tier.bm25_floor_offset
        if dominance_ok and floor_ok:
            top = bm25_hits[0]
            if all(a.article_id != top.article_id for a in accepted):
                accepted.append(Acceptance(top.article_id, SOURCE_LEXICAL, top.score))

    return accepted


def fuse(bm25_hits: list[ScoredHit], emb_hits: list[ScoredHit], query_len: int,
         tiers: list[TierConfig] | None = None,
         fallback_source: str = SOURCE_EMBEDDING,
         fallback: bool = True) -> FusionResult:
    """Run the tier cascade and the no-confidence fallback.

    Raises NoCandidates when both hit lists are empty. With ``fallback``
    enabled the result is non-empty whenever either list is non-empty.
    """
    if tiers is None:
        tiers = default_tiers()
    check_tier_order(tiers)
    if not bm25_hits and not emb_hits:
        raise NoCandidates("both hit lists are empty")

    accepted: list[FusionEntry] = []
    seen: set[str] = set()
    for tier in tiers:
        added = 0
        for cand in evaluate_tier(bm25_hits, emb_hits, query_len, tier):
            if cand.article_id in seen or added >= tier.max_additional:
                continue
            accepted.append(FusionEntry(cand.article_id, tier.name,
                                        cand.source, cand.score))
            seen.add(cand.article_id)
            added += 1

    used_fallback = False
    if not accepted and fallback:
        used_fallback = True
        if fallback_source == SOURCE_EMBEDDING and emb_hits:
            top, source = emb_hits[0], SOURCE_EMBEDDING
        elif bm25_hits:
            top, source = bm25_hits[0], SOURCE_LEXICAL
        else:
            top, source = emb_hits[0], SOURCE_EMBEDDING
        accepted.append(FusionEntry(top.article_id, FALLBACK_TIER, source, top.score))

    return FusionResult(accepted=accepted, used_fallback=used_fallback)


# ---------------------------------------------------------------------------
# JSON (de)serialization of tier sets, for --config files
# ---------------------------------------------------------------------------


def tiers_to_dict(tiers: list[TierConfig]) -> dict:
    return {
        t.name: {
            "dominance": t.bm25_dominance,
            "floor_offset": t.bm25_floor_offset,
            "emb_min": t.emb_sim_min,
            "max_additional": t.max_additional,
        }
        for t in tiers
    }


def tiers_from_dict(d: dict) -> list[TierConfig]:
    order = [n for n in ("high", "medium", "low") if n in d]
    order += [n for n in d if n not in order]
    return [
        TierConfig(
            name=n,
            bm25_dominance=float(d[n]["dominance"]),
            bm25_floor_offset=float(d[n]["floor_offset"]),
            emb_sim_min=float(d[n]["emb_min"]),
            max_additional=int(d[n].get("max_additional", 1)),
        )
        for n in order
    ]
