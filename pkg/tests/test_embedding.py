"""CBOW trainer: gradient correctness, determinism, vector IO."""

import numpy as np
import pytest

from statuteqa.analysis import TokenStream, tokenize
from statuteqa.embedding import (
    CbowConfig,
    EmbeddingModel,
    continue_training,
    load_vectors,
    negative_sampling_gradients,
    negative_sampling_loss,
    save_vectors,
    train_cbow,
)
from statuteqa.errors import (
    DuplicateWord,
    EmptyVocabulary,
    HeaderMismatch,
    MalformedLine,
)


def _stream(text):
    return tokenize(text)


def _toy_streams():
    return [_stream("a b " * 40)]


class TestGradients:
    def test_finite_difference_check(self):
        """Analytic gradients match central differences at random points."""
        rng = np.random.default_rng(42)
        v, dim = 12, 6
        inp = rng.normal(size=(v, dim)) * 0.5
        out = rng.normal(size=(v, dim)) * 0.5
        center, context, negatives = 3, [0, 1, 5, 1], [7, 9, 2]

        grad_in, grad_out = negative_sampling_gradients(
            inp, out, center, context, negatives
        )
        h = 1e-6
        checked = 0
        for _ in range(10):
            which = rng.integers(0, 2)
            row = int(rng.integers(0, v))
            col = int(rng.integers(0, dim))
            mat = inp if which == 0 else out
            orig = mat[row, col]
            mat[row, col] = orig + h
            up = negative_sampling_loss(inp, out, center, context, negatives)
            mat[row, col] = orig - h
            down = negative_sampling_loss(inp, out, center, context, negatives)
            mat[row, col] = orig
            numeric = (up - down) / (2 * h)
            analytic = (grad_in if which == 0 else grad_out)[row, col]
            if abs(numeric) < 1e-10 and abs(analytic) < 1e-10:
                checked += 1
                continue
            rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric))
            assert rel < 1e-5, (which, row, col, analytic, numeric)
            checked += 1
        assert checked == 10

    def test_loss_positive_and_finite(self):
        rng = np.random.default_rng(0)
        inp = rng.normal(size=(8, 4))
        out = rng.normal(size=(8, 4))
        loss = negative_sampling_loss(inp, out, 0, [1, 2], [3, 4, 5])
        assert np.isfinite(loss) and loss > 0

    def test_untouched_rows_have_zero_gradient(self):
        rng = np.random.default_rng(1)
        inp = rng.normal(size=(10, 3))
        out = rng.normal(size=(10, 3))
        grad_in, grad_out = negative_sampling_gradients(inp, out, 0, [1, 2], [3])
        assert not grad_in[5].any() and not grad_out[6].any()


class TestTrainCbow:
    def test_loss_decreases_on_toy_corpus(self):
        """Alternating two-token corpus is learnable; epoch 50 beats epoch 0."""
        model = train_cbow(
            _toy_streams(), CbowConfig(dim=8, window=2, epochs=51, seed=3)
        )
        assert len(model.loss_history) == 51
        assert model.loss_history[50] < model.loss_history[0]
        assert all(np.isfinite(x) for x in model.loss_history)

    def test_seeded_determinism_bitwise(self):
        cfg = CbowConfig(dim=8, window=2, epochs=5, seed=9)
        m1 = train_cbow(_toy_streams(), cfg)
        m2 = train_cbow(_toy_streams(), cfg)
        assert np.array_equal(m1.input_vectors, m2.input_vectors)
        assert np.array_equal(m1.output_vectors, m2.output_vectors)

    def test_different_seeds_differ(self):
        m1 = train_cbow(_toy_streams(), CbowConfig(dim=8, window=2, epochs=5, seed=1))
        m2 = train_cbow(_toy_streams(), CbowConfig(dim=8, window=2, epochs=5, seed=2))
        assert not np.array_equal(m1.input_vectors, m2.input_vectors)

    def test_empty_vocabulary_raises(self):
        with pytest.raises(EmptyVocabulary):
            train_cbow([_stream("a b c")], CbowConfig(dim=4, epochs=1, min_count=5))

    def test_min_count_filters(self):
        model = train_cbow(
            [_stream("common common common rare")],
            CbowConfig(dim=4, epochs=1, min_count=2),
        )
        assert "common" in model.vocab and "rare" not in model.vocab

    def test_no_nan_after_training(self, tiny_model):
        assert np.all(np.isfinite(tiny_model.input_vectors))
        assert np.all(np.isfinite(tiny_model.output_vectors))

    def test_vocab_rows_unique(self, tiny_model):
        rows = list(tiny_model.vocab.values())
        assert len(rows) == len(set(rows)) == len(tiny_model.words)

    def test_two_stage_training(self):
        cfg = CbowConfig(dim=8, window=2, epochs=4, seed=5)
        model = train_cbow(_toy_streams(), cfg)
        continue_training(model, [_stream("c d " * 30)], cfg)
        assert {"a", "b", "c", "d"} <= set(model.vocab)
        assert len(model.loss_history) == 8
        assert np.all(np.isfinite(model.input_vectors))

    def test_two_stage_deterministic(self):
        cfg = CbowConfig(dim=8, window=2, epochs=4, seed=5)
        runs = []
        for _ in range(2):
            model = train_cbow(_toy_streams(), cfg)
            continue_training(model, [_stream("b c " * 30)], cfg)
            runs.append(model.input_vectors.copy())
        assert np.array_equal(runs[0], runs[1])


class TestVectorIO:
    def test_save_load_round_trip(self, tmp_path, tiny_model):
        path = tmp_path / "vectors.txt"
        save_vectors(tiny_model, path)
        loaded = load_vectors(path)
        assert loaded.dim == tiny_model.dim
        assert loaded.words == tiny_model.words
        assert np.allclose(
            loaded.input_vectors, tiny_model.input_vectors, atol=1e-6
        )

    def test_basic_parse(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("2 3\nalpha 1.0 2.0 3.0\nbeta 0.5 0.25 0.125\n")
        model = load_vectors(path)
        assert model.dim == 3 and len(model.words) == 2
        assert model.vector("beta")[2] == pytest.approx(0.125)

    def test_header_mismatch(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("3 3\nalpha 1 2 3\nbeta 4 5 6\n")
        with pytest.raises(HeaderMismatch):
            load_vectors(path)

    def test_malformed_line_numbered(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("2 3\nalpha 1 2 3\nbeta 4 x 6\n")
        with pytest.raises(MalformedLine) as err:
            load_vectors(path)
        assert err.value.line_no == 3

    def test_wrong_field_count_is_malformed(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("1 3\nalpha 1 2\n")
        with pytest.raises(MalformedLine):
            load_vectors(path)

    def test_duplicate_word(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("2 2\nalpha 1 2\nalpha 3 4\n")
        with pytest.raises(DuplicateWord):
            load_vectors(path)

    def test_save_deterministic(self, tmp_path, tiny_model):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        save_vectors(tiny_model, a)
        save_vectors(tiny_model, b)
        assert a.read_bytes() == b.read_bytes()


class TestModelValidation:
    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            EmbeddingModel(
                dim=3, vocab={"a": 0}, words=["a"],
                input_vectors=np.zeros((2, 3)),
            )

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            EmbeddingModel(
                dim=2, vocab={"a": 0}, words=["a"],
                input_vectors=np.array([[np.nan, 0.0]]),
            )

    def test_config_validation(self):
        with pytest.raises(ValueError):
            CbowConfig(dim=0)
        with pytest.raises(ValueError):
            CbowConfig(window=0)
