"""Lexical search: an inverted index with Okapi BM25 scoring.

BM25 rewards terms that are frequent in an article but rare in the rest
of the corpus, and it saturates with term frequency so a term repeated
ten times does not score ten times as much. Scores stay raw
(unnormalized) on purpose: the fusion stage compares them against the
query length.
"""

from pathlib import Path

from statuteqa import build_index, search_bm25, split_statute, tokenize

DATA = Path(__file__).resolve().parents[1] / "data"

corpus = split_statute((DATA / "sample_statute.txt").read_text(encoding="utf-8"))
index = build_index(corpus)

print(f"indexed {len(index)} articles, "
      f"{len(index.postings)} distinct terms, "
      f"average length {index.avg_doc_len:.1f} tokens\n")

for text in [
    "must a guarantee be made in writing",
    "interest on the purchase price after delivery",
    "may the lessee sublease without approval",
]:
    query = tokenize(text)
    hits = search_bm25(index, query, k=3)
    print(f"query: {text!r}")
    for h in hits:
        print(f"    {h.score:7.3f}  {h.article_id}")
    print()

# The "r in every article" effect: common terms carry almost no weight.
idf = index.idf
print("idf('the')      =", round(idf.lookup("the"), 4), " (appears everywhere)")
print("idf('guarantor')=", round(idf.lookup("guarantor"), 4), " (appears once)")
