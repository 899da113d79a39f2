import math

import numpy as np
import pytest
import scipy.sparse as sp

from xling.errors import CorruptModelError, DimensionMismatchError, VersionMismatchError
from xling.lsi import (
    LsiModel,
    build_cross_matrix,
    build_mono_matrix,
    embed_crosslingual,
    load_model,
    project,
    save_model,
    train,
)
from xling.synthetic import SyntheticSpec, make_parallel_corpus
from xling.textprep import tokenize
from xling.vsm import DocVector, TermDocMatrix, Vocabulary, cosine

LN2 = math.log(2.0)


def _dummy_matrix(dense: np.ndarray) -> TermDocMatrix:
    """Wrap a dense array as a TermDocMatrix with a placeholder vocabulary."""
    n_terms, n_docs = dense.shape
    vocab = Vocabulary([f"t{i:03d}" for i in range(n_terms)], [1] * n_terms, max(n_docs, 1))
    return TermDocMatrix(sp.csc_matrix(dense), vocab)


def _tokens(docs):
    return [[t.reduced for t in tokenize(d.text)] for d in docs]


class TestBuildMonoMatrix:
    def test_hand_computed_tfidf(self):
        tdm = build_mono_matrix([["a", "b"], ["b", "c"]])
        dense = tdm.matrix.toarray()
        expected = np.array(
            [
                [LN2, 0.0],  # a: df=1
                [0.0, 0.0],  # b: df=2 -> weight 0
                [0.0, LN2],  # c: df=1
            ]
        )
        assert np.array_equal(dense, expected)

    def test_single_document_zero_matrix_flagged(self):
        with pytest.warns(UserWarning, match="single-document"):
            tdm = build_mono_matrix([["a", "b"]])
        assert tdm.matrix.nnz == 0

    def test_disjoint_documents_block_structure(self):
        tdm = build_mono_matrix([["a", "b"], ["x", "y"]])
        dense = tdm.matrix.toarray()
        vocab = tdm.vocabulary
        for term, j in (("a", 0), ("b", 0), ("x", 1), ("y", 1)):
            row = vocab.index(term)
            assert dense[row, j] > 0
            assert dense[row, 1 - j] == 0


class TestBuildCrossMatrix:
    def test_single_couple_degenerate_flagged(self):
        with pytest.warns(UserWarning, match="single-couple"):
            tdm = build_cross_matrix([["a"]], [["x"]])
        assert tdm.matrix.nnz == 0

    def test_two_couples_disjoint_supports(self):
        tdm = build_cross_matrix([["a"], ["b"]], [["x"], ["y"]])
        dense = tdm.matrix.toarray()
        assert set(np.nonzero(dense[:, 0])[0]) .isdisjoint(np.nonzero(dense[:, 1])[0])

    def test_three_couple_toy_matches_hand_built_matrix(self):
        src = [["a", "b"], ["b"], ["c", "b"]]
        tgt = [["x"], ["y", "x"], ["y"]]
        tdm = build_cross_matrix(src, tgt)
        vocab = tdm.vocabulary
        d = 3
        # dense reference: weight = tf * ln(d / df), df over couples per side
        dense = np.zeros((len(vocab), d))
        for j in range(d):
            for side, doc in (("source", src[j]), ("target", tgt[j])):
                side_vocab = vocab.vocab_for(side)
                offset = vocab.offset_for(side)
                for term in set(doc):
                    tf = doc.count(term)
                    df = int(side_vocab.df[side_vocab.index(term)])
                    dense[offset + side_vocab.index(term), j] = tf * math.log(d / df)
        assert np.allclose(tdm.matrix.toarray(), dense, atol=0)

    def test_row_layout_source_block_first(self):
        tdm = build_cross_matrix([["a"], ["b"]], [["x"], ["y"]], "en", "ar")
        vocab = tdm.vocabulary
        assert vocab.term_at(0) == ("a", "source")
        assert vocab.term_at(len(vocab.source)) == ("x", "target")
        assert vocab.source_language == "en"

    def test_couple_count_mismatch(self):
        with pytest.raises(ValueError):
            build_cross_matrix([["a"]], [["x"], ["y"]])


class TestTrain:
    def test_identity_matrix_unit_singular_values(self):
        with pytest.warns(UserWarning, match="clamped"):
            model = train(_dummy_matrix(np.eye(5)), k=5)
        assert model.k == 4  # clamped to min(d-1, |V|-1)
        assert np.allclose(model.s, 1.0, atol=1e-12)

    def test_rank_one_outer_product(self):
        u = np.array([3.0, 0.0, 4.0])
        v = np.array([2.0, 2.0, 1.0])
        with pytest.warns(UserWarning, match="clamped"):
            model = train(_dummy_matrix(np.outer(u, v)), k=3)
        assert model.k == 1  # trailing zero singular values are dropped
        sigma = np.linalg.norm(u) * np.linalg.norm(v)
        assert model.s[0] == pytest.approx(sigma, rel=1e-12)

    def test_sparse_factors_match_dense_svd_oracle(self):
        rng = np.random.default_rng(11)
        left = sp.random(50, 30, density=0.4, random_state=rng,
                         data_rvs=rng.standard_normal, format="csr")
        scales = sp.diags([2.0 ** (-0.5 * i) for i in range(30)])
        right = sp.random(30, 40, density=0.4, random_state=rng,
                          data_rvs=rng.standard_normal, format="csr")
        dense = (left @ scales @ right).toarray()
        model = train(_dummy_matrix(dense), k=10)
        oracle = np.linalg.svd(dense, compute_uv=False)[:10]
        assert np.max(np.abs(model.s - oracle) / oracle) < 1e-6

    def test_zero_matrix_rejected(self):
        with pytest.raises(ValueError):
            train(_dummy_matrix(np.zeros((4, 4))), k=2)

    def test_factor_invariants(self):
        rng = np.random.default_rng(3)
        model = train(_dummy_matrix(rng.random((30, 20))), k=8)
        gram = model.u.T @ model.u
        assert np.linalg.norm(gram - np.eye(model.k)) < 1e-6
        assert np.all(np.diff(model.s) <= 1e-12)
        assert np.all(model.s > 0)

    def test_determinism_for_fixed_seed(self):
        dense = np.random.default_rng(5).random((25, 15))
        a = train(_dummy_matrix(dense), k=6, seed=42)
        b = train(_dummy_matrix(dense), k=6, seed=42)
        assert np.array_equal(a.u, b.u)
        assert np.array_equal(a.s, b.s)
        assert np.array_equal(a.v, b.v)

    def test_reconstruction_error_non_increasing_in_k(self):
        rng = np.random.default_rng(9)
        dense = rng.random((40, 25))
        errors = []
        for k in (2, 5, 10, 15):
            model = train(_dummy_matrix(dense), k=k)
            approx = model.u @ np.diag(model.s) @ model.v.T
            errors.append(np.linalg.norm(dense - approx))
        assert all(a >= b - 1e-9 for a, b in zip(errors, errors[1:]))


class TestProject:
    def _model(self):
        docs = [["a", "b", "b"], ["b", "c"], ["a", "c", "d"], ["d", "e"]]
        return train(build_mono_matrix(docs), k=3)

    def test_zero_vector(self):
        model = self._model()
        out = project(DocVector.empty(len(model.vocabulary)), model)
        assert np.array_equal(out, np.zeros(model.k))

    def test_training_columns_reproduce_v_rows(self):
        docs = [["a", "b", "b"], ["b", "c"], ["a", "c", "d"], ["d", "e"]]
        tdm = build_mono_matrix(docs)
        model = train(tdm, k=3)
        for j in range(tdm.n_docs):
            out = project(tdm.column(j), model)
            assert np.max(np.abs(out - model.v[j])) < 1e-6

    def test_unseen_terms_only(self):
        model = self._model()
        from xling.vsm import vectorize

        vec = vectorize(["zz", "qq"], model.vocabulary)
        assert np.array_equal(project(vec, model), np.zeros(model.k))

    def test_dimension_mismatch(self):
        model = self._model()
        with pytest.raises(DimensionMismatchError):
            project(DocVector.empty(99), model)
        with pytest.raises(DimensionMismatchError):
            project(np.ones(99), model)

    def test_linearity(self):
        model = self._model()
        size = len(model.vocabulary)
        rng = np.random.default_rng(1)
        u = rng.random(size)
        v = rng.random(size)
        left = project(2.5 * u + 0.5 * v, model)
        right = 2.5 * project(u, model) + 0.5 * project(v, model)
        assert np.max(np.abs(left - right)) < 1e-9


class TestEmbedCrosslingual:
    def _cross_model(self, n_pairs=40, k=10, seed=0):
        spec = SyntheticSpec(n_topics=5, words_per_topic=30, common_words=8,
                             doc_length=(60, 100), topic_alpha=0.2)
        corpus = make_parallel_corpus(n_pairs, spec, seed=seed)
        matrix = build_cross_matrix(_tokens(corpus.source_docs), _tokens(corpus.target_docs))
        return corpus, train(matrix, k=k)

    def test_wrong_language_terms_give_zero_embedding(self):
        _, model = self._cross_model()
        target_term = model.vocabulary.target.terms[0]
        out = embed_crosslingual([target_term], "source", model)
        assert np.array_equal(out, np.zeros(model.k))

    def test_monolingual_model_rejected(self):
        model = train(build_mono_matrix([["a", "b"], ["b", "c"], ["a", "c"]]), k=2)
        with pytest.raises(ValueError):
            embed_crosslingual(["a"], "source", model)

    def test_concatenated_couple_equals_column_projection(self):
        corpus, model = self._cross_model()
        src = _tokens(corpus.source_docs)
        tgt = _tokens(corpus.target_docs)
        vocab = model.vocabulary
        j = 7
        combined = (
            vocab.side_vector(src[j], "source").to_dense()
            + vocab.side_vector(tgt[j], "target").to_dense()
        )
        assert np.max(np.abs(project(combined, model) - model.v[j])) < 1e-6

    def test_cipher_couples_nearly_parallel_embeddings(self):
        corpus, model = self._cross_model()
        src = _tokens(corpus.source_docs)
        tgt = _tokens(corpus.target_docs)
        sims = [
            cosine(
                embed_crosslingual(src[j], "source", model),
                embed_crosslingual(tgt[j], "target", model),
            )
            for j in range(len(src))
        ]
        assert min(sims) > 0.99

    def test_couple_closer_than_unrelated(self):
        spec = SyntheticSpec(n_topics=5, words_per_topic=30, common_words=5,
                             doc_length=(60, 100), topic_alpha=0.05)
        corpus = make_parallel_corpus(5, spec, seed=3)
        matrix = build_cross_matrix(_tokens(corpus.source_docs), _tokens(corpus.target_docs))
        model = train(matrix, k=4)
        src, tgt = _tokens(corpus.source_docs), _tokens(corpus.target_docs)
        for j in range(5):
            own = cosine(
                embed_crosslingual(src[j], "source", model),
                embed_crosslingual(tgt[j], "target", model),
            )
            for m in range(5):
                if m == j:
                    continue
                other = cosine(
                    embed_crosslingual(src[j], "source", model),
                    embed_crosslingual(tgt[m], "target", model),
                )
                assert own > other


class TestModelPersistence:
    def _models(self):
        mono = train(build_mono_matrix([["a", "b"], ["b", "c"], ["a", "d"]]), k=2)
        spec = SyntheticSpec(n_topics=3, words_per_topic=10, common_words=4,
                             doc_length=(20, 30), topic_alpha=0.3)
        corpus = make_parallel_corpus(8, spec, seed=1)
        cross = train(
            build_cross_matrix(_tokens(corpus.source_docs), _tokens(corpus.target_docs)), k=4
        )
        return mono, cross

    @pytest.mark.parametrize("which", ["mono", "cross"])
    def test_round_trip_bit_identical(self, tmp_path, which):
        mono, cross = self._models()
        model = mono if which == "mono" else cross
        path = tmp_path / "m.xlsm"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.kind == model.kind
        assert np.array_equal(loaded.u, model.u)
        assert np.array_equal(loaded.s, model.s)
        assert np.array_equal(loaded.v, model.v)
        resaved = tmp_path / "m2.xlsm"
        save_model(loaded, resaved)
        assert resaved.read_bytes() == path.read_bytes()

    def test_truncated_file(self, tmp_path):
        mono, _ = self._models()
        path = tmp_path / "m.xlsm"
        save_model(mono, path)
        path.write_bytes(path.read_bytes()[:-16])
        with pytest.raises(CorruptModelError):
            load_model(path)

    def test_version_mismatch_names_both_versions(self, tmp_path):
        mono, _ = self._models()
        path = tmp_path / "m.xlsm"
        save_model(mono, path)
        blob = bytearray(path.read_bytes())
        blob[4:8] = (2).to_bytes(4, "little")
        path.write_bytes(bytes(blob))
        with pytest.raises(VersionMismatchError) as err:
            load_model(path)
        assert "2" in str(err.value) and "1" in str(err.value)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "m.xlsm"
        path.write_bytes(b"WHAT" + b"\0" * 100)
        with pytest.raises(CorruptModelError):
            load_model(path)


class TestLsiModelValidation:
    def test_singular_value_order_enforced(self):
        vocab = Vocabulary(["a", "b"], [1, 1], 2)
        u = np.eye(2)
        with pytest.raises(ValueError):
            LsiModel(u, np.array([1.0, 2.0]), np.eye(2), vocab, "monolingual")

    def test_kind_checked(self):
        vocab = Vocabulary(["a", "b"], [1, 1], 2)
        with pytest.raises(ValueError):
            LsiModel(np.eye(2), np.array([2.0, 1.0]), np.eye(2), vocab, "bilingual")
