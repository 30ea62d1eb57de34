"""Statute parsing and query/label datasets.

Statute files are plain UTF-8 text where each article starts on a line
matching a header pattern such as ``Article 87`` or ``Article 87-2``.
Everything between two headers is the body of the first one.
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DuplicateArticleId, MissingField, NoArticlesFound, ParseError

DEFAULT_HEADER_PATTERN = r"^Article\s+\d+(?:-\d+)?"


@dataclass(frozen=True)
class Article:
    """One statute article, the unit of retrieval."""

    id: str
    title: str | None
    body: str
    ordinal: int

    def __post_init__(self):
        if not self.id:
            raise ValueError("article id must be non-empty")
        if not self.body.strip():
            raise ValueError(f"article {self.id!r} has an empty body")
        if self.ordinal < 0:
            raise ValueError("ordinal must be >= 0")


@dataclass
class Corpus:
    """Ordered article collection with total id lookup."""

    articles: list[Article]
    source_name: str = ""
    _by_id: dict[str, Article] = field(init=False, repr=False)

    def __post_init__(self):
        self._by_id = {}
        for i, art in enumerate(self.articles):
            if art.ordinal != i:
                raise ValueError(
                    f"ordinals must be consecutive from 0, got {art.ordinal} at {i}"
                )
            if art.id in self._by_id:
                raise DuplicateArticleId(art.id)
            self._by_id[art.id] = art

    def __len__(self) -> int:
        return len(self.articles)

    def __iter__(self):
        return iter(self.articles)

    def __getitem__(self, ordinal: int) -> Article:
        return self.articles[ordinal]

    def by_id(self, article_id: str) -> Article:
        return self._by_id[article_id]

    def __contains__(self, article_id: str) -> bool:
        return article_id in self._by_id


@dataclass(frozen=True)
class SplitRules:
    """Header grammar for carving a statute file into articles."""

    header_pattern: str = DEFAULT_HEADER_PATTERN

    def compiled(self) -> re.Pattern:
        return re.compile(self.header_pattern)


@dataclass
class QueryRecord:
    """One bar-exam style statement with optional gold annotations."""

    qid: str
    text: str
    gold_article_ids: set[str] = field(default_factory=set)
    gold_entailment: bool | None = None

    def __post_init__(self):
        if not self.qid:
            raise ValueError("qid must be non-empty")
        if not self.text:
            raise ValueError(f"query {self.qid!r} has empty text")


def split_statute(raw_text: str, rules: SplitRules = SplitRules(),
                  source_name: str = "") -> Corpus:
    """Carve ``raw_text`` into articles at header lines.

    Line endings are normalized to LF first. Every non-header,
    non-blank character lands in exactly one article body; text before
    the first header is kept with the first article so nothing is
    silently dropped.
    """
    pattern = rules.compiled()
    text = raw_text.replace("\r\n", "\n").replace("\r", "\n")

    headers: list[tuple[str, int]] = []   # (normalized id, line index)
    lines = text.split("\n")
    for i, line in enumerate(lines):
        m = pattern.match(line)
        if m:
            headers.append((re.sub(r"\s+", " ", m.group(0)).strip(), i))

    if not headers:
        raise NoArticlesFound("no article header matched")

    seen: set[str] = set()
    for art_id, _ in headers:
        if art_id in seen:
            raise DuplicateArticleId(art_id)
        seen.add(art_id)

    articles: list[Article] = []
    for n, (art_id, line_idx) in enumerate(headers):
        end = headers[n + 1][1] if n + 1 < len(headers) else len(lines)
        body_lines = []
        # remainder of the header line after the matched id
        m = pattern.match(lines[line_idx])
        rest = lines[line_idx][m.end():].strip()
        if n == 0 and line_idx > 0:
            body_lines.extend(l.rstrip() for l in lines[:line_idx])
        if rest:
            body_lines.append(rest)
        body_lines.extend(l.rstrip() for l in lines[line_idx + 1:end])
        body = "\n".join(body_lines).strip("\n").strip()
        articles.append(Article(id=art_id, title=None, body=body, ordinal=n))

    return Corpus(articles=articles, source_name=source_name)


def render_statute(corpus: Corpus) -> str:
    """Serialize a corpus back to splittable statute text."""
    blocks = [f"{a.id}\n{a.body}" for a in corpus.articles]
    return "\n\n".join(blocks) + "\n"


# ---------------------------------------------------------------------------
# Corpus JSONL persistence: one object per line {"id","title","body","ordinal"}
# ---------------------------------------------------------------------------


def save_corpus_jsonl(corpus: Corpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for a in corpus.articles:
            rec = {"id": a.id, "title": a.title, "body": a.body, "ordinal": a.ordinal}
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def load_corpus_jsonl(path: str | Path, source_name: str | None = None) -> Corpus:
    articles = []
    with open(path, "r", encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(str(exc), record=i) from exc
            for fld in ("id", "body", "ordinal"):
                if fld not in rec:
                    raise MissingField(fld, record=i)
            articles.append(Article(
                id=rec["id"], title=rec.get("title"),
                body=rec["body"], ordinal=rec["ordinal"],
            ))
    if not articles:
        raise NoArticlesFound(f"no articles in {path}")
    return Corpus(articles=articles,
                  source_name=source_name or Path(path).name)


def load_statute_or_corpus(path: str | Path) -> Corpus:
    """Load a corpus from either raw statute text or corpus JSONL."""
    p = Path(path)
    if p.suffix == ".jsonl":
        return load_corpus_jsonl(p)
    return split_statute(p.read_text(encoding="utf-8"), source_name=p.name)


# ---------------------------------------------------------------------------
# Query datasets
# ---------------------------------------------------------------------------


def load_queries(path: str | Path, format: str = "jsonl") -> list[QueryRecord]:
    """Read query records in the given format.

    ``jsonl``: one object per line with fields qid, text, optional
    ``gold`` (list of article ids) and ``label`` (bool).
    ``coliee-xml-subset``: ``<pair id=.. label=..><t1>..</t1><t2>..</t2>``
    elements; gold article ids are the header patterns found in t1 and
    the query text is t2.
    """
    if format == "jsonl":
        records = _load_queries_jsonl(path)
    elif format == "coliee-xml-subset":
        records = _load_queries_xml(path)
    else:
        raise ValueError(f"unknown query format {format!r}")
    seen: set[str] = set()
    for i, rec in enumerate(records):
        if rec.qid in seen:
            raise ParseError(f"duplicate qid {rec.qid!r}", record=i)
        seen.add(rec.qid)
    return records


def _load_queries_jsonl(path: str | Path) -> list[QueryRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(str(exc), record=i) from exc
            for fld in ("qid", "text"):
                if fld not in rec:
                    raise MissingField(fld, record=i)
            gold = rec.get("gold")
            label = rec.get("label")
            records.append(QueryRecord(
                qid=str(rec["qid"]),
                text=str(rec["text"]),
                gold_article_ids=set(gold) if gold else set(),
                gold_entailment=bool(label) if label is not None else None,
            ))
    return records


def _load_queries_xml(path: str | Path,
                      header_pattern: str = DEFAULT_HEADER_PATTERN) -> list[QueryRecord]:
    try:
        tree = ET.parse(path)
    except ET.ParseError as exc:
        raise ParseError(str(exc)) from exc
    id_re = re.compile(header_pattern.lstrip("^"))
    records = []
    for i, pair in enumerate(tree.getroot().iter("pair")):
        qid = pair.get("id")
        if not qid:
            raise MissingField("id", record=i)
        t2 = pair.find("t2")
        if t2 is None or not (t2.text or "").strip():
            raise MissingField("t2", record=i)
        t1 = pair.find("t1")
        gold = set()
        if t1 is not None and t1.text:
            gold = {re.sub(r"\s+", " ", m.group(0)) for m in id_re.finditer(t1.text)}
        label = pair.get("label")
        records.append(QueryRecord(
            qid=qid,
            text=t2.text.strip(),
            gold_article_ids=gold,
            gold_entailment={"Y": True, "N": False}.get(label) if label else None,
        ))
    return records


def save_queries(records: list[QueryRecord], path: str | Path) -> None:
    """Write records as query JSONL (inverse of the jsonl reader)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            obj: dict = {"qid": rec.qid, "text": rec.text}
            if rec.gold_article_ids:
                obj["gold"] = sorted(rec.gold_article_ids)
            if rec.gold_entailment is not None:
                obj["label"] = rec.gold_entailment
            fh.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n")


def check_gold_resolves(records: list[QueryRecord], corpus: Corpus) -> None:
    """Verify that every gold article id names a corpus article."""
    for rec in records:
        for art_id in rec.gold_article_ids:
            if art_id not in corpus:
                raise ParseError(
                    f"gold article {art_id!r} of query {rec.qid!r} not in corpus"
                )
