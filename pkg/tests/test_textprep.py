import pytest
from hypothesis import given, strategies as st

from xling.bidict import BilingualDictionary
from xling.textprep import (
    PipelineConfig,
    ReducerKind,
    Token,
    apply_filters,
    corpus_term_counts,
    lemmatize,
    light_stem,
    load_affix_list,
    load_stopwords,
    make_reducer,
    morphar_lookup,
    reduce,
    root_stem,
    run_pipeline,
    suffix_stem,
    tokenize,
)


class TestTokenize:
    def test_punctuation_dropped_lowercased(self):
        assert [t.reduced for t in tokenize("He writes, well.")] == ["he", "writes", "well"]

    def test_empty(self):
        assert tokenize("") == []

    def test_digits_kept_mixed_runs_intact(self):
        assert [t.reduced for t in tokenize("v2.0 beta")] == ["v2", "0", "beta"]

    def test_surface_preserved(self):
        assert tokenize("He")[0] == Token("He", "he")

    def test_no_lowercase(self):
        assert [t.reduced for t in tokenize("He", lowercase=False)] == ["He"]

    def test_arabic_text(self):
        assert [t.reduced for t in tokenize("زيت الزيتون جيد!")] == [
            "زيت", "الزيتون", "جيد",
        ]


# Expected stems trace the shipped affix tables on the classic
# write/travel inflection families.
AR_STEM_CASES = [
    ("المكتبة", "مكتب", "كتب"),
    ("الكاتب", "كاتب", "كتب"),
    ("الكتاب", "كتاب", "كتب"),
    ("يكتب", "كتب", "كتب"),
    ("المسافرون", "مسافر", "سفر"),
    ("المسافرين", "مسافر", "سفر"),
    ("سيسافر", "سافر", "سفر"),
    ("سافرت", "سافر", "سفر"),
]


class TestReducers:
    def test_identity(self):
        assert reduce("library", ReducerKind.IDENTITY) == "library"

    @pytest.mark.parametrize("word,light,root", AR_STEM_CASES)
    def test_light_stemmer(self, word, light, root):
        assert light_stem(word) == light

    @pytest.mark.parametrize("word,light,root", AR_STEM_CASES)
    def test_rooter(self, word, light, root):
        assert root_stem(word) == root

    def test_rooter_falls_back_to_light_stem_on_short_words(self):
        assert root_stem("ما") == "ما"

    def test_suffix_stemmer(self):
        assert suffix_stem("writes") == "write"

    def test_suffix_stemmer_cascade(self):
        assert suffix_stem("takings") == "take"  # plural strip exposes -ing

    def test_suffix_stemmer_keeps_short_words(self):
        assert suffix_stem("as") == "as"

    def test_lemma_table_hit_and_fallback(self):
        assert lemmatize("went") == "go"
        assert lemmatize("children") == "child"
        assert lemmatize("writes") == "write"  # falls through to the stemmer

    def test_affix_strippers_never_lengthen(self):
        for word, _, _ in AR_STEM_CASES:
            assert len(light_stem(word)) <= len(word)
            assert len(root_stem(word)) <= len(word)

    def test_morphar_requires_dictionary(self):
        with pytest.raises(ValueError):
            reduce("word", ReducerKind.MORPHAR)
        with pytest.raises(ValueError):
            make_reducer(ReducerKind.MORPHAR)


_WORD_ALPHABET = st.sampled_from(list("abcdefgsty") + list("اكتبسمونيةهل"))
_random_words = st.text(alphabet=_WORD_ALPHABET, min_size=1, max_size=12)


class TestIdempotency:
    @pytest.mark.parametrize(
        "kind",
        [
            ReducerKind.IDENTITY,
            ReducerKind.SUFFIX_STEMMER,
            ReducerKind.LEMMA_TABLE,
            ReducerKind.LIGHT_STEMMER,
            ReducerKind.ROOTER,
        ],
    )
    @given(word=_random_words)
    def test_reduce_twice_equals_once(self, kind, word):
        once = reduce(word, kind)
        assert reduce(once, kind) == once


class TestMorphar:
    def _dictionary(self):
        # One entry keyed by a light stem, one keyed by a root.
        return BilingualDictionary(
            [
                (("مكتب",), ("office",)),
                (("سفر",), ("travel",)),
            ]
        )

    def test_light_path_wins_root_never_consulted(self):
        d = self._dictionary()
        assert morphar_lookup("المكتبة", d) == frozenset({"office"})

    def test_root_fallback(self):
        d = self._dictionary()
        # light stem of المسافرون is مسافر (absent); its root سفر is present
        assert morphar_lookup("المسافرون", d) == frozenset({"travel"})

    def test_oov_empty(self):
        assert morphar_lookup("قلم", self._dictionary()) == frozenset()

    def test_priority_property_reducer(self):
        d = self._dictionary()
        reducer = make_reducer(ReducerKind.MORPHAR, dictionary=d)
        assert reducer("المكتبة") == "مكتب"  # light hit keeps the stem
        assert reducer("المسافرون") == "سفر"  # falls back to the root


def _tok(*words: str) -> list[Token]:
    return [Token(w, w) for w in words]


class TestFilters:
    def test_low_frequency_removed(self):
        # "rare" occurs twice in the corpus, below the threshold of three
        docs = [_tok("rare", "common"), _tok("rare", "common", "common")]
        counts = corpus_term_counts(docs)
        config = PipelineConfig(min_corpus_frequency=3)
        filtered = apply_filters(docs, config, counts)
        assert [[t.reduced for t in d] for d in filtered] == [
            ["common"],
            ["common", "common"],
        ]

    def test_identity_config_is_identity(self):
        docs = [_tok("a", "b"), _tok("c")]
        filtered = apply_filters(docs, PipelineConfig(), corpus_term_counts(docs))
        assert filtered == docs

    def test_stopwords_removed(self):
        docs = [_tok("the", "oil"), _tok("the")]
        config = PipelineConfig(stopwords=frozenset({"the"}))
        filtered = apply_filters(docs, config, corpus_term_counts(docs))
        assert [[t.reduced for t in d] for d in filtered] == [["oil"], []]

    def test_min_frequency_validation(self):
        with pytest.raises(ValueError):
            PipelineConfig(min_corpus_frequency=0)

    @given(
        texts=st.lists(
            st.text(alphabet=list("ab c"), min_size=0, max_size=20), min_size=1, max_size=5
        )
    )
    def test_filtering_never_increases_token_count(self, texts):
        docs = [tokenize(t) for t in texts]
        config = PipelineConfig(stopwords=frozenset({"a"}), min_corpus_frequency=2)
        filtered = apply_filters(docs, config, corpus_term_counts(docs))
        for before, after in zip(docs, filtered):
            assert len(after) <= len(before)


class TestRunPipeline:
    def test_end_to_end(self):
        texts = ["The libraries opened.", "The library closed, closed."]
        config = PipelineConfig(
            stopwords=frozenset({"the"}),
            reducer_source=ReducerKind.SUFFIX_STEMMER,
        )
        docs = run_pipeline(texts, config, side="source")
        assert docs == [["library", "opene"], ["library", "close", "close"]]

    def test_pipeline_default_is_tokenize(self):
        assert run_pipeline(["He writes, well."]) == [["he", "writes", "well"]]


class TestListFiles:
    def test_stopwords_with_comments(self, tmp_path):
        path = tmp_path / "stop.txt"
        path.write_text("# comment\nthe\nof # trailing\n\n", encoding="utf-8")
        assert load_stopwords(path) == frozenset({"the", "of"})

    def test_affix_list_keeps_order(self, tmp_path):
        path = tmp_path / "prefix.txt"
        path.write_text("وال\nال\nو\n", encoding="utf-8")
        assert load_affix_list(path) == ("وال", "ال", "و")
