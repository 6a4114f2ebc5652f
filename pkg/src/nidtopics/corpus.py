"""Sparse bag-of-words corpora."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence

import numpy as np
import scipy.sparse as sp


@dataclass
class Corpus:
    """Document collection as a sparse (n_docs, d) count matrix."""

    counts: sp.csr_matrix
    vocab: Optional[List[str]] = None

    def __post_init__(self):
        mat = sp.csr_matrix(self.counts)
        mat.sum_duplicates()
        if mat.nnz and (not np.issubdtype(mat.dtype, np.integer)):
            data = mat.data
            if not np.all(data == np.round(data)):
                raise ValueError("counts must be integers")
        mat = mat.astype(np.int64)
        if mat.nnz and mat.data.min() <= 0:
            raise ValueError("counts must be positive")
        self.counts = mat
        if self.vocab is not None and len(self.vocab) != self.d:
            raise ValueError(f"vocabulary has {len(self.vocab)} entries for d={self.d}")

    @property
    def n_docs(self) -> int:
        return self.counts.shape[0]

    @property
    def d(self) -> int:
        return self.counts.shape[1]

    def doc_lengths(self) -> np.ndarray:
        return np.asarray(self.counts.sum(axis=1)).ravel()

    def doc_words(self, i: int) -> np.ndarray:
        """Word ids of document i expanded to a flat array (length N_i)."""
        row = self.counts.getrow(i)
        return np.repeat(row.indices, row.data)

    def subset(self, indices: Sequence[int]) -> "Corpus":
        idx = np.asarray(indices, dtype=int)
        return Corpus(self.counts[idx], vocab=self.vocab)

    def permute_vocab(self, perm: Sequence[int]) -> "Corpus":
        """Relabel word ids: new id perm[w] for old id w."""
        perm = np.asarray(perm, dtype=int)
        mat = self.counts.tocoo()
        new = sp.csr_matrix((mat.data, (mat.row, perm[mat.col])), shape=mat.shape)
        vocab = None
        if self.vocab is not None:
            vocab = [""] * self.d
            for w, token in enumerate(self.vocab):
                vocab[perm[w]] = token
        return Corpus(new, vocab=vocab)


def corpus_from_docs(docs: Iterable[dict | Sequence], d: int,
                     vocab: Optional[List[str]] = None) -> Corpus:
    """Build a corpus from per-document {word_id: count} mappings
    or (word_ids, counts) pairs."""
    rows, cols, data = [], [], []
    n = 0
    for i, doc in enumerate(docs):
        n = i + 1
        items = doc.items() if isinstance(doc, dict) else zip(*doc)
        for w, c in items:
            rows.append(i)
            cols.append(int(w))
            data.append(int(c))
    mat = sp.csr_matrix((data, (rows, cols)), shape=(n, d), dtype=np.int64)
    return Corpus(mat, vocab=vocab)
