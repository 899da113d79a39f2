"""Synthetic bilingual corpora with known ground truth.

Documents are drawn from a topic mixture: each document samples a Dirichlet
mixture over topics and emits Zipf-weighted words from per-topic
vocabularies plus a shared pool of common words. The "other language" is a
deterministic word substitution (a cipher), which gives perfectly known
alignments while preserving realistic frequency structure - handy for
exercising retrieval and alignment end to end without external resources.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bidict import BilingualDictionary
from .corpus import AlignedCorpus, Document

__all__ = [
    "SyntheticSpec",
    "cipher_word",
    "cipher_tokens",
    "source_vocabulary",
    "make_parallel_corpus",
    "make_comparable_corpus",
    "add_target_noise",
    "make_dictionary",
    "make_grouped_documents",
]


@dataclass(frozen=True)
class SyntheticSpec:
    """Shape of the generative mixture.

    Topic popularity is Zipfian (the Dirichlet base measure is skewed), so
    a sample of documents contains clusters of same-topic confusables the
    way a month of news does.
    """

    n_topics: int = 20
    words_per_topic: int = 15
    common_words: int = 12
    doc_length: tuple[int, int] = (60, 100)
    topic_alpha: float = 0.4
    common_fraction: float = 0.4
    source_language: str = "en"
    target_language: str = "ar"


def _topic_words(spec: SyntheticSpec, topic: int) -> list[str]:
    return [f"s{topic:02d}x{i:03d}" for i in range(spec.words_per_topic)]


def _common_words(spec: SyntheticSpec) -> list[str]:
    return [f"scmn{i:03d}" for i in range(spec.common_words)]


def source_vocabulary(spec: SyntheticSpec) -> list[str]:
    """Every word the generator can emit on the source side."""
    words = _common_words(spec)
    for t in range(spec.n_topics):
        words.extend(_topic_words(spec, t))
    return words


def cipher_word(word: str) -> str:
    """Deterministic source-to-target substitution: ``sNN...`` -> ``tNN...``."""
    return "t" + word[1:]


def cipher_tokens(tokens: Sequence[str]) -> list[str]:
    return [cipher_word(w) for w in tokens]


def _zipf(n: int) -> np.ndarray:
    weights = 1.0 / np.arange(1, n + 1)
    return weights / weights.sum()


class _Generator:
    def __init__(self, spec: SyntheticSpec, rng: np.random.Generator):
        self.spec = spec
        self.rng = rng
        self.topic_vocab = [_topic_words(spec, t) for t in range(spec.n_topics)]
        self.common_vocab = _common_words(spec)
        self.topic_p = _zipf(spec.words_per_topic)
        self.common_p = _zipf(spec.common_words)

    def mixture(self) -> np.ndarray:
        alpha = self.spec.topic_alpha * self.spec.n_topics * _zipf(self.spec.n_topics)
        return self.rng.dirichlet(alpha)

    def tokens(self, theta: np.ndarray) -> list[str]:
        lo, hi = self.spec.doc_length
        length = int(self.rng.integers(lo, hi + 1))
        is_common = self.rng.random(length) < self.spec.common_fraction
        topics = self.rng.choice(self.spec.n_topics, size=length, p=theta)
        topic_word = self.rng.choice(self.spec.words_per_topic, size=length, p=self.topic_p)
        common_word = self.rng.choice(self.spec.common_words, size=length, p=self.common_p)
        out = []
        for i in range(length):
            if is_common[i]:
                out.append(self.common_vocab[common_word[i]])
            else:
                out.append(self.topic_vocab[topics[i]][topic_word[i]])
        return out


def make_parallel_corpus(
    n_pairs: int, spec: SyntheticSpec = SyntheticSpec(), seed: int = 0
) -> AlignedCorpus:
    """Aligned pairs where the target is the cipher of the source tokens."""
    gen = _Generator(spec, np.random.default_rng(seed))
    source, target = [], []
    for i in range(n_pairs):
        tokens = gen.tokens(gen.mixture())
        source.append(
            Document(f"e{i:04d}", spec.source_language, " ".join(tokens))
        )
        target.append(
            Document(f"a{i:04d}", spec.target_language, " ".join(cipher_tokens(tokens)))
        )
    return AlignedCorpus(tuple(source), tuple(target))


def make_comparable_corpus(
    n_pairs: int, spec: SyntheticSpec = SyntheticSpec(), seed: int = 0
) -> AlignedCorpus:
    """Aligned pairs sharing a topic mixture but independently sampled.

    The two sides discuss the same topics without being translations,
    which mimics comparable (rather than parallel) documents.
    """
    gen = _Generator(spec, np.random.default_rng(seed))
    source, target = [], []
    for i in range(n_pairs):
        theta = gen.mixture()
        source.append(
            Document(f"e{i:04d}", spec.source_language, " ".join(gen.tokens(theta)))
        )
        target.append(
            Document(
                f"a{i:04d}", spec.target_language, " ".join(cipher_tokens(gen.tokens(theta)))
            )
        )
    return AlignedCorpus(tuple(source), tuple(target))


def add_target_noise(
    corpus: AlignedCorpus,
    fraction: float,
    spec: SyntheticSpec = SyntheticSpec(),
    seed: int = 0,
) -> AlignedCorpus:
    """Replace a fraction of every target document with off-topic words.

    Replacement words are drawn uniformly from the whole target vocabulary,
    so they stay in-model but point away from the document's topics.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must be in [0, 1]")
    rng = np.random.default_rng(seed)
    inventory = [cipher_word(w) for w in source_vocabulary(spec)]
    noisy = []
    for doc in corpus.target_docs:
        tokens = doc.text.split()
        n_replace = int(round(fraction * len(tokens)))
        positions = rng.choice(len(tokens), size=n_replace, replace=False)
        picks = rng.choice(len(inventory), size=n_replace)
        for pos, pick in zip(positions, picks):
            tokens[pos] = inventory[pick]
        noisy.append(
            Document(
                doc.id, doc.language, " ".join(tokens), doc.group_key, doc.category
            )
        )
    return AlignedCorpus(corpus.source_docs, tuple(noisy))


def make_dictionary(
    spec: SyntheticSpec = SyntheticSpec(), coverage: float = 1.0, seed: int = 0
) -> BilingualDictionary:
    """Word-for-word dictionary covering a seeded fraction of the vocabulary."""
    if not 0.0 < coverage <= 1.0:
        raise ValueError("coverage must be in (0, 1]")
    words = source_vocabulary(spec)
    rng = np.random.default_rng(seed)
    keep = max(1, int(round(coverage * len(words))))
    chosen = sorted(rng.choice(len(words), size=keep, replace=False))
    return BilingualDictionary(
        [((words[i],), (cipher_word(words[i]),)) for i in chosen]
    )


def make_grouped_documents(
    n_groups: int,
    planted_per_group: int,
    distractors_per_side: int,
    spec: SyntheticSpec = SyntheticSpec(),
    seed: int = 0,
) -> tuple[list[Document], list[Document], dict[str, str]]:
    """Unaligned grouped corpora with planted comparable pairs.

    Each group (think: one month of news) holds ``planted_per_group``
    source/target couples that share a topic mixture, plus independent
    same-topic-pool distractor documents on both sides. Returns the two
    document lists and the gold source-to-target mapping for the planted
    pairs.
    """
    gen = _Generator(spec, np.random.default_rng(seed))
    source_docs: list[Document] = []
    target_docs: list[Document] = []
    gold: dict[str, str] = {}
    for g in range(n_groups):
        year, month = divmod(g, 12)
        group = f"{2012 + year}-{month + 1:02d}"
        for p in range(planted_per_group):
            theta = gen.mixture()
            sid = f"e{g:02d}p{p:03d}"
            tid = f"a{g:02d}p{p:03d}"
            source_docs.append(
                Document(sid, spec.source_language, " ".join(gen.tokens(theta)), group)
            )
            target_docs.append(
                Document(
                    tid,
                    spec.target_language,
                    " ".join(cipher_tokens(gen.tokens(theta))),
                    group,
                )
            )
            gold[sid] = tid
        for d in range(distractors_per_side):
            source_docs.append(
                Document(
                    f"e{g:02d}d{d:03d}",
                    spec.source_language,
                    " ".join(gen.tokens(gen.mixture())),
                    group,
                )
            )
            target_docs.append(
                Document(
                    f"a{g:02d}d{d:03d}",
                    spec.target_language,
                    " ".join(cipher_tokens(gen.tokens(gen.mixture()))),
                    group,
                )
            )
    return source_docs, target_docs, gold
