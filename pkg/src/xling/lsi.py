"""Truncated-SVD latent semantic indexing over term-document matrices.

Supports a monolingual space (one language's matrix) and a cross-lingual
space whose rows stack both languages' vocabularies and whose columns are
concatenated document couples. Unseen documents enter a trained space by
fold-in: ``v' = v^t U S^{-1}``.

The factorization is a randomized range-finder (Gaussian sketch, power
iterations, small-matrix SVD) so large sparse vocabularies stay cheap; a
dense SVD oracle pins its correctness in the test suite. Swap
``_randomized_svd`` for an iterative solver if a different accuracy
profile is ever needed.
"""

from __future__ import annotations

import json
import struct
import warnings
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import (
    ConvergenceError,
    CorruptModelError,
    DimensionMismatchError,
    EmptyCorpusError,
    VersionMismatchError,
)
from .vsm import (
    DocVector,
    TermDocMatrix,
    Vocabulary,
    build_term_doc_matrix,
    build_vocabulary,
    tfidf_weight,
)

__all__ = [
    "CrossVocabulary",
    "LsiModel",
    "build_mono_matrix",
    "build_cross_matrix",
    "train",
    "project",
    "embed_crosslingual",
    "save_model",
    "load_model",
    "DEFAULT_RANK",
]

# Default latent dimension; retrieval quality plateaus in the low hundreds.
DEFAULT_RANK = 300

_RANK_TRUNCATION = 1e-10  # singular values below this times s[0] are dropped


class CrossVocabulary:
    """Combined index over two vocabularies with per-term language tags.

    Source terms occupy rows ``[0, len(source))``; target terms follow at
    an offset, so the two languages can never collide even when they share
    surface strings.
    """

    __slots__ = ("source", "target", "source_language", "target_language")

    def __init__(
        self,
        source: Vocabulary,
        target: Vocabulary,
        source_language: str = "src",
        target_language: str = "tgt",
    ):
        if source.n_docs != target.n_docs:
            raise ValueError(
                "per-side document counts differ: %d vs %d" % (source.n_docs, target.n_docs)
            )
        self.source = source
        self.target = target
        self.source_language = source_language
        self.target_language = target_language

    def __len__(self) -> int:
        return len(self.source) + len(self.target)

    @property
    def n_docs(self) -> int:
        return self.source.n_docs

    def vocab_for(self, side: str) -> Vocabulary:
        if side == "source":
            return self.source
        if side == "target":
            return self.target
        raise ValueError(f"side must be 'source' or 'target', got {side!r}")

    def offset_for(self, side: str) -> int:
        return 0 if side == "source" else len(self.source)

    def term_at(self, i: int) -> tuple[str, str]:
        if i < len(self.source):
            return self.source.terms[i], "source"
        return self.target.terms[i - len(self.source)], "target"

    def side_vector(self, tokens: Sequence[str], side: str) -> DocVector:
        """tfidf vector over the combined index with the other side zeroed."""
        vocab = self.vocab_for(side)
        offset = self.offset_for(side)
        counts = Counter(tokens)
        weights: dict[int, float] = {}
        for term, tf in counts.items():
            i = vocab.get(term)
            if i is None:
                continue
            w = tfidf_weight(tf, int(vocab.df[i]), vocab.n_docs)
            if w != 0.0:
                weights[offset + i] = w
        return DocVector.from_mapping(weights, len(self))

    def to_dict(self) -> dict:
        return {
            "source": self.source.to_dict(),
            "target": self.target.to_dict(),
            "source_language": self.source_language,
            "target_language": self.target_language,
        }

    @classmethod
    def from_dict(cls, payload: Mapping) -> "CrossVocabulary":
        return cls(
            Vocabulary.from_dict(payload["source"]),
            Vocabulary.from_dict(payload["target"]),
            payload["source_language"],
            payload["target_language"],
        )


def build_mono_matrix(documents: Sequence[Sequence[str]]) -> TermDocMatrix:
    """Term-document tfidf matrix over one language's token lists.

    With a single document every df equals N, so the matrix is all zeros;
    that degenerate case is flagged with a warning.
    """
    if not documents:
        raise EmptyCorpusError("no documents")
    if len(documents) == 1:
        warnings.warn("single-document corpus: every tfidf weight is zero", stacklevel=2)
    vocabulary = build_vocabulary(documents)
    return build_term_doc_matrix(documents, vocabulary)


def build_cross_matrix(
    source_documents: Sequence[Sequence[str]],
    target_documents: Sequence[Sequence[str]],
    source_language: str = "src",
    target_language: str = "tgt",
) -> TermDocMatrix:
    """Stacked-vocabulary matrix whose columns are concatenated couples.

    Document frequencies are computed over the concatenated pseudo-documents
    (a term's df is the number of couples whose own side contains it).
    """
    if not source_documents or not target_documents:
        raise EmptyCorpusError("no documents")
    if len(source_documents) != len(target_documents):
        raise ValueError(
            "couple counts differ: %d source vs %d target"
            % (len(source_documents), len(target_documents))
        )
    if len(source_documents) == 1:
        warnings.warn("single-couple corpus: every tfidf weight is zero", stacklevel=2)
    vocabulary = CrossVocabulary(
        build_vocabulary(source_documents),
        build_vocabulary(target_documents),
        source_language,
        target_language,
    )
    rows, cols, data = [], [], []
    for j, (src_tokens, tgt_tokens) in enumerate(zip(source_documents, target_documents)):
        for side, tokens in (("source", src_tokens), ("target", tgt_tokens)):
            vec = vocabulary.side_vector(tokens, side)
            rows.append(vec.indices)
            cols.append(np.full(vec.nnz, j, dtype=np.int64))
            data.append(vec.values)
    matrix = sp.csc_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(len(vocabulary), len(source_documents)),
    )
    return TermDocMatrix(matrix, vocabulary)


@dataclass(frozen=True)
class LsiModel:
    """Truncated SVD factors plus the vocabulary needed to fold in queries.

    ``u`` is term-by-k with orthonormal columns, ``s`` the positive singular
    values in descending order, ``v`` document-by-k. ``kind`` is
    ``"monolingual"`` or ``"crosslingual"``.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray
    vocabulary: Vocabulary | CrossVocabulary
    kind: str

    def __post_init__(self):
        if self.kind not in ("monolingual", "crosslingual"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        k = self.s.shape[0]
        if self.u.ndim != 2 or self.u.shape[1] != k or self.v.ndim != 2 or self.v.shape[1] != k:
            raise ValueError("factor shapes are inconsistent")
        if self.u.shape[0] != len(self.vocabulary):
            raise ValueError("u rows do not match the vocabulary size")
        if k and (np.any(self.s <= 0) or np.any(np.diff(self.s) > 1e-9 * self.s[0])):
            raise ValueError("singular values must be positive and descending")

    @property
    def k(self) -> int:
        return int(self.s.shape[0])

    @property
    def n_docs(self) -> int:
        return int(self.v.shape[0])


def _randomized_svd(
    a: sp.spmatrix,
    k: int,
    oversample: int,
    power_iterations: int,
    seed: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    m, n = a.shape
    sketch = min(k + oversample, min(m, n))
    rng = np.random.default_rng(seed)
    omega = rng.standard_normal((n, sketch))
    q, _ = np.linalg.qr(a @ omega)
    for _ in range(power_iterations):
        z, _ = np.linalg.qr(a.T @ q)
        q, _ = np.linalg.qr(a @ z)
    b = (a.T @ q).T
    ub, s, vt = np.linalg.svd(b, full_matrices=False)
    return (q @ ub)[:, :k], s[:k], vt[:k, :]


def train(
    matrix: TermDocMatrix,
    k: int = DEFAULT_RANK,
    *,
    oversample: int = 10,
    power_iterations: int = 2,
    seed: int = 42,
) -> LsiModel:
    """Factorize a term-document matrix into a rank-``k`` LSI model.

    ``k`` is clamped to ``min(k, d - 1, |V| - 1)`` with a warning, and the
    effective rank shrinks further when trailing singular values fall below
    the rank-truncation threshold (they are never inverted). Deterministic
    for a fixed seed.
    """
    a = matrix.matrix
    if a.nnz == 0:
        raise ValueError("matrix has no nonzero entries (degenerate corpus?)")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n_terms, n_docs = a.shape
    k_cap = min(n_docs - 1, n_terms - 1)
    if k_cap < 1:
        raise ValueError(f"matrix of shape {a.shape} is too small to factorize")
    if k > k_cap:
        warnings.warn(f"k={k} clamped to {k_cap} for a {n_terms}x{n_docs} matrix", stacklevel=2)
        k = k_cap

    u, s, vt = _randomized_svd(a, k, oversample, power_iterations, seed)
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(s)) and np.all(np.isfinite(vt))):
        raise ConvergenceError(
            "factorization produced non-finite values",
            diagnostics={
                "shape": tuple(a.shape),
                "k": k,
                "oversample": oversample,
                "power_iterations": power_iterations,
                "seed": seed,
            },
        )

    keep = s > _RANK_TRUNCATION * (s[0] if len(s) else 0.0)
    u, s, vt = u[:, keep], s[keep], vt[keep, :]

    # Fix the sign ambiguity so equal inputs give byte-equal factors: the
    # largest-magnitude entry of each left singular vector is positive.
    for i in range(u.shape[1]):
        pivot = np.argmax(np.abs(u[:, i]))
        if u[pivot, i] < 0:
            u[:, i] = -u[:, i]
            vt[i, :] = -vt[i, :]

    kind = "crosslingual" if isinstance(matrix.vocabulary, CrossVocabulary) else "monolingual"
    return LsiModel(
        np.ascontiguousarray(u),
        np.ascontiguousarray(s),
        np.ascontiguousarray(vt.T),
        matrix.vocabulary,
        kind,
    )


def project(doc_vector: DocVector | np.ndarray, model: LsiModel) -> np.ndarray:
    """Fold a document vector into the LSI space: ``v' = v^t U S^{-1}``.

    For a training column ``j`` the result reproduces row ``j`` of ``V``.
    """
    if isinstance(doc_vector, DocVector):
        if doc_vector.size != model.u.shape[0]:
            raise DimensionMismatchError(
                f"vector size {doc_vector.size} does not match |V|={model.u.shape[0]}"
            )
        if doc_vector.nnz == 0:
            return np.zeros(model.k)
        return (doc_vector.values @ model.u[doc_vector.indices, :]) / model.s
    arr = np.asarray(doc_vector, dtype=np.float64)
    if arr.shape != (model.u.shape[0],):
        raise DimensionMismatchError(
            f"vector shape {arr.shape} does not match |V|={model.u.shape[0]}"
        )
    return (arr @ model.u) / model.s


def embed_crosslingual(tokens: Sequence[str], side: str, model: LsiModel) -> np.ndarray:
    """Embed one side's document with the other language's coordinates zero."""
    if model.kind != "crosslingual":
        raise ValueError("embed_crosslingual needs a crosslingual model")
    vec = model.vocabulary.side_vector(tokens, side)
    return project(vec, model)


# --------------------------------------------------------------------------
# Model persistence: magic, version, kind, k, vocabulary block, then U, S, V
# as little-endian 64-bit floats. Round trips are byte-exact.
# --------------------------------------------------------------------------

_MODEL_MAGIC = b"XLSM"
_MODEL_VERSION = 1
_MODEL_HEADER = struct.Struct("<4sIBIQQ")  # magic, version, kind, k, |V|, d


def save_model(model: LsiModel, path: str | Path) -> None:
    kind_byte = 1 if model.kind == "crosslingual" else 0
    vocab_payload = (
        {"cross": model.vocabulary.to_dict()}
        if isinstance(model.vocabulary, CrossVocabulary)
        else {"mono": model.vocabulary.to_dict()}
    )
    vocab_blob = json.dumps(vocab_payload, sort_keys=True, ensure_ascii=False).encode("utf-8")
    with Path(path).open("wb") as fh:
        fh.write(
            _MODEL_HEADER.pack(
                _MODEL_MAGIC,
                _MODEL_VERSION,
                kind_byte,
                model.k,
                model.u.shape[0],
                model.v.shape[0],
            )
        )
        fh.write(struct.pack("<Q", len(vocab_blob)))
        fh.write(vocab_blob)
        fh.write(model.u.astype("<f8").tobytes(order="C"))
        fh.write(model.s.astype("<f8").tobytes(order="C"))
        fh.write(model.v.astype("<f8").tobytes(order="C"))


def load_model(path: str | Path) -> LsiModel:
    blob = Path(path).read_bytes()
    if len(blob) < _MODEL_HEADER.size + 8:
        raise CorruptModelError("model file too short for its header")
    magic, version, kind_byte, k, n_terms, n_docs = _MODEL_HEADER.unpack_from(blob, 0)
    if magic != _MODEL_MAGIC:
        raise CorruptModelError("not a model file (bad magic bytes)")
    if version != _MODEL_VERSION:
        raise VersionMismatchError(found=version, supported=_MODEL_VERSION)
    offset = _MODEL_HEADER.size
    (vocab_len,) = struct.unpack_from("<Q", blob, offset)
    offset += 8
    if len(blob) < offset + vocab_len:
        raise CorruptModelError("model file truncated inside the vocabulary block")
    try:
        vocab_payload = json.loads(blob[offset : offset + vocab_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptModelError(f"unreadable vocabulary block: {exc}") from exc
    offset += vocab_len

    if "cross" in vocab_payload:
        vocabulary: Vocabulary | CrossVocabulary = CrossVocabulary.from_dict(
            vocab_payload["cross"]
        )
    elif "mono" in vocab_payload:
        vocabulary = Vocabulary.from_dict(vocab_payload["mono"])
    else:
        raise CorruptModelError("vocabulary block missing 'mono'/'cross' entry")
    if len(vocabulary) != n_terms:
        raise CorruptModelError("vocabulary size does not match the header")

    expected = offset + 8 * (n_terms * k + k + n_docs * k)
    if len(blob) != expected:
        raise CorruptModelError(f"model file has {len(blob)} bytes, expected {expected}")

    def take(count: int, shape: tuple[int, ...]) -> np.ndarray:
        nonlocal offset
        arr = np.frombuffer(blob, dtype="<f8", count=count, offset=offset).reshape(shape)
        offset += 8 * count
        return arr.astype(np.float64)

    u = take(n_terms * k, (n_terms, k))
    s = take(k, (k,))
    v = take(n_docs * k, (n_docs, k))
    kind = "crosslingual" if kind_byte == 1 else "monolingual"
    return LsiModel(u, s, v, vocabulary, kind)
