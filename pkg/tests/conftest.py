from pathlib import Path

import pytest

from statuteqa.analysis import AnalyzerConfig, build_idf, tokenize
from statuteqa.bm25 import build_index
from statuteqa.centroid import build_centroid_store
from statuteqa.corpus import load_queries, split_statute
from statuteqa.embedding import CbowConfig, train_cbow
from statuteqa.entailment import load_votes

DATA_DIR = Path(__file__).resolve().parents[1] / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def analyzer() -> AnalyzerConfig:
    return AnalyzerConfig()


@pytest.fixture(scope="session")
def sample_corpus(data_dir):
    text = (data_dir / "sample_statute.txt").read_text(encoding="utf-8")
    return split_statute(text, source_name="sample_statute.txt")


@pytest.fixture(scope="session")
def sample_idf(sample_corpus, analyzer):
    return build_idf(sample_corpus, analyzer)


@pytest.fixture(scope="session")
def sample_index(sample_corpus, analyzer):
    return build_index(sample_corpus, analyzer)


@pytest.fixture(scope="session")
def tiny_model(sample_corpus, analyzer):
    texts = [tokenize(a.body, analyzer) for a in sample_corpus]
    return train_cbow(texts, CbowConfig(dim=16, window=5, epochs=12, seed=7))


@pytest.fixture(scope="session")
def sample_store(sample_corpus, tiny_model, sample_idf, analyzer):
    return build_centroid_store(sample_corpus, tiny_model, sample_idf, analyzer)


@pytest.fixture(scope="session")
def sample_queries(data_dir):
    return load_queries(data_dir / "queries.jsonl")


@pytest.fixture(scope="session")
def sample_votes(data_dir):
    return load_votes(data_dir / "votes.jsonl")
