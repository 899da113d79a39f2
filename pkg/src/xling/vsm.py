"""Vocabulary, tfidf weighting, sparse document vectors and cosine.

Weighting is ``tf * ln(N/df)`` with raw in-document counts and no
smoothing, so a term present in every document weighs zero. This function
is the single place to swap weighting variants.
"""

from __future__ import annotations

import math
import struct
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import (
    CorruptModelError,
    DimensionMismatchError,
    EmptyCorpusError,
    WeightDomainError,
)

__all__ = [
    "Vocabulary",
    "DocVector",
    "TermDocMatrix",
    "build_vocabulary",
    "tfidf_weight",
    "vectorize",
    "cosine",
    "build_term_doc_matrix",
    "save_matrix",
    "load_matrix",
    "write_matrix_debug_dump",
]


class Vocabulary:
    """Term/index bijection plus the df statistics needed for tfidf.

    Indices are dense in ``[0, len(vocab))`` and assigned in lexicographic
    term order, so builds are reproducible byte for byte.
    """

    __slots__ = ("terms", "df", "n_docs", "_index")

    def __init__(self, terms: Sequence[str], df: Sequence[int], n_docs: int):
        self.terms: tuple[str, ...] = tuple(terms)
        self.df: np.ndarray = np.asarray(df, dtype=np.int64)
        self.n_docs = int(n_docs)
        if len(self.terms) != len(self.df):
            raise ValueError("terms and df lengths differ")
        if self.n_docs < 1:
            raise ValueError("n_docs must be >= 1")
        if len(self.df) and (self.df.min() < 1 or self.df.max() > self.n_docs):
            raise ValueError("df values must lie in [1, n_docs]")
        self._index = {t: i for i, t in enumerate(self.terms)}
        if len(self._index) != len(self.terms):
            raise ValueError("duplicate terms")

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self._index

    def index(self, term: str) -> int:
        return self._index[term]

    def get(self, term: str) -> int | None:
        return self._index.get(term)

    def idf(self, term_index: int) -> float:
        return math.log(self.n_docs / self.df[term_index])

    def to_dict(self) -> dict:
        return {"terms": list(self.terms), "df": self.df.tolist(), "n_docs": self.n_docs}

    @classmethod
    def from_dict(cls, payload: Mapping) -> "Vocabulary":
        return cls(payload["terms"], payload["df"], payload["n_docs"])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Vocabulary)
            and self.terms == other.terms
            and self.n_docs == other.n_docs
            and np.array_equal(self.df, other.df)
        )


def build_vocabulary(documents: Sequence[Sequence[str]]) -> Vocabulary:
    """Build a vocabulary over tokenized documents.

    df counts the number of documents containing a term (duplicates within
    one document count once). An empty document list is an error; documents
    that are themselves empty are fine.
    """
    if not documents:
        raise EmptyCorpusError("cannot build a vocabulary from zero documents")
    df: Counter = Counter()
    for doc in documents:
        df.update(set(doc))
    terms = sorted(df)
    return Vocabulary(terms, [df[t] for t in terms], len(documents))


def tfidf_weight(tf: int, df: int, n_docs: int) -> float:
    """``tf * ln(N/df)``; zero iff tf is zero or the term is ubiquitous."""
    if tf < 0:
        raise WeightDomainError(f"tf must be >= 0, got {tf}")
    if df > n_docs:
        raise WeightDomainError(f"df {df} exceeds document count {n_docs}")
    if tf == 0:
        return 0.0
    if df == 0:
        raise WeightDomainError("df is 0 for a term with tf > 0")
    return tf * math.log(n_docs / df)


@dataclass(frozen=True)
class DocVector:
    """Sparse vector: sorted unique indices with finite weights."""

    indices: np.ndarray
    values: np.ndarray
    size: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if idx.shape != val.shape or idx.ndim != 1:
            raise ValueError("indices/values must be 1-D and equally sized")
        if len(idx) and (np.any(np.diff(idx) <= 0) or idx[0] < 0 or idx[-1] >= self.size):
            raise ValueError("indices must be strictly increasing and within range")
        if not np.all(np.isfinite(val)):
            raise ValueError("weights must be finite")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @classmethod
    def empty(cls, size: int) -> "DocVector":
        return cls(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64), size)

    @classmethod
    def from_mapping(cls, weights: Mapping[int, float], size: int) -> "DocVector":
        items = sorted(weights.items())
        idx = np.array([i for i, _ in items], dtype=np.int64)
        val = np.array([v for _, v in items], dtype=np.float64)
        return cls(idx, val, size)

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.values, self.values)))

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.size, dtype=np.float64)
        dense[self.indices] = self.values
        return dense


def vectorize(tokens: Iterable[str], vocabulary: Vocabulary) -> DocVector:
    """tfidf vector of a token list; unseen terms are dropped."""
    counts: Counter = Counter(tokens)
    weights: dict[int, float] = {}
    for term, tf in counts.items():
        i = vocabulary.get(term)
        if i is None:
            continue
        w = tfidf_weight(tf, int(vocabulary.df[i]), vocabulary.n_docs)
        if w != 0.0:
            weights[i] = w
    return DocVector.from_mapping(weights, len(vocabulary))


def _sparse_dot(u: DocVector, v: DocVector) -> float:
    # Merge on sorted indices.
    common, iu, iv = np.intersect1d(u.indices, v.indices, return_indices=True)
    if not len(common):
        return 0.0
    return float(np.dot(u.values[iu], v.values[iv]))


def cosine(u, v) -> float:
    """Cosine similarity; 0.0 when either vector has zero norm.

    Accepts sparse :class:`DocVector` or dense 1-D arrays (both sides must
    live in the same dimension space).
    """
    if isinstance(u, DocVector) and isinstance(v, DocVector):
        if u.size != v.size:
            raise DimensionMismatchError(f"vector sizes differ: {u.size} vs {v.size}")
        nu, nv = u.norm(), v.norm()
        if nu == 0.0 or nv == 0.0:
            return 0.0
        return _sparse_dot(u, v) / (nu * nv)

    if isinstance(u, DocVector):
        u, v = v, u  # normalize to (dense, DocVector) or (dense, dense)
    ua = np.asarray(u, dtype=np.float64)
    if isinstance(v, DocVector):
        if ua.shape != (v.size,):
            raise DimensionMismatchError(f"vector sizes differ: {ua.shape[0]} vs {v.size}")
        nu = float(np.linalg.norm(ua))
        nv = v.norm()
        if nu == 0.0 or nv == 0.0:
            return 0.0
        return float(np.dot(ua[v.indices], v.values)) / (nu * nv)

    va = np.asarray(v, dtype=np.float64)
    if ua.shape != va.shape:
        raise DimensionMismatchError(f"vector shapes differ: {ua.shape} vs {va.shape}")
    nu = float(np.linalg.norm(ua))
    nv = float(np.linalg.norm(va))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(ua, va)) / (nu * nv)


@dataclass(frozen=True)
class TermDocMatrix:
    """Sparse term-by-document weight matrix over a vocabulary."""

    matrix: sp.csc_matrix
    vocabulary: object  # Vocabulary or lsi.CrossVocabulary
    weighting: str = "tf*ln(N/df)"

    @property
    def n_terms(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_docs(self) -> int:
        return self.matrix.shape[1]

    def column(self, j: int) -> DocVector:
        col = self.matrix.getcol(j).tocoo()
        order = np.argsort(col.row)
        return DocVector(col.row[order].astype(np.int64), col.data[order], self.n_terms)


def build_term_doc_matrix(
    documents: Sequence[Sequence[str]], vocabulary: Vocabulary
) -> TermDocMatrix:
    """Stack tfidf document vectors as columns of a sparse matrix."""
    if not documents:
        raise EmptyCorpusError("cannot build a matrix from zero documents")
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    data: list[np.ndarray] = []
    for j, tokens in enumerate(documents):
        vec = vectorize(tokens, vocabulary)
        rows.append(vec.indices)
        cols.append(np.full(vec.nnz, j, dtype=np.int64))
        data.append(vec.values)
    matrix = sp.csc_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(len(vocabulary), len(documents)),
    )
    return TermDocMatrix(matrix, vocabulary)


# --------------------------------------------------------------------------
# Matrix persistence: little-endian binary header + coordinate triples,
# plus a human-readable text dump for debugging.
# --------------------------------------------------------------------------

_MATRIX_MAGIC = b"XTDM"
_MATRIX_VERSION = 1
_HEADER = struct.Struct("<4sIQQQQ")  # magic, version, N, |V|, d, nnz
_TRIPLE = struct.Struct("<QQd")


def save_matrix(tdm: TermDocMatrix, path: str | Path) -> None:
    coo = tdm.matrix.tocoo()
    order = np.lexsort((coo.row, coo.col))
    n_docs_stat = getattr(tdm.vocabulary, "n_docs", tdm.n_docs)
    tag = tdm.weighting.encode("utf-8")
    with Path(path).open("wb") as fh:
        fh.write(
            _HEADER.pack(
                _MATRIX_MAGIC, _MATRIX_VERSION, n_docs_stat, tdm.n_terms, tdm.n_docs, coo.nnz
            )
        )
        fh.write(struct.pack("<H", len(tag)))
        fh.write(tag)
        for k in order:
            fh.write(_TRIPLE.pack(int(coo.row[k]), int(coo.col[k]), float(coo.data[k])))


def load_matrix(path: str | Path) -> tuple[sp.csc_matrix, dict]:
    """Read a matrix file; returns the matrix and its header fields.

    The vocabulary is not stored in matrix files (models carry it); the
    header keeps the statistics needed to interpret the weights.
    """
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size + 2:
        raise CorruptModelError("matrix file too short for its header")
    magic, version, n_stat, n_terms, n_docs, nnz = _HEADER.unpack_from(blob, 0)
    if magic != _MATRIX_MAGIC:
        raise CorruptModelError("not a matrix file (bad magic bytes)")
    if version != _MATRIX_VERSION:
        raise CorruptModelError(f"unsupported matrix format version {version}")
    offset = _HEADER.size
    (tag_len,) = struct.unpack_from("<H", blob, offset)
    offset += 2
    tag = blob[offset : offset + tag_len].decode("utf-8")
    offset += tag_len
    expected = offset + nnz * _TRIPLE.size
    if len(blob) != expected:
        raise CorruptModelError(f"matrix file has {len(blob)} bytes, expected {expected}")
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=np.float64)
    for k in range(nnz):
        rows[k], cols[k], vals[k] = _TRIPLE.unpack_from(blob, offset)
        offset += _TRIPLE.size
    matrix = sp.csc_matrix((vals, (rows, cols)), shape=(n_terms, n_docs))
    header = {"n_docs_stat": n_stat, "n_terms": n_terms, "n_docs": n_docs, "weighting": tag}
    return matrix, header


def write_matrix_debug_dump(tdm: TermDocMatrix, path: str | Path) -> None:
    """Text dump: header line then ``row col value`` triples."""
    coo = tdm.matrix.tocoo()
    order = np.lexsort((coo.row, coo.col))
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(
            f"# terms={tdm.n_terms} docs={tdm.n_docs} nnz={coo.nnz} weighting={tdm.weighting}\n"
        )
        for k in order:
            fh.write(f"{coo.row[k]} {coo.col[k]} {coo.data[k]!r}\n")
