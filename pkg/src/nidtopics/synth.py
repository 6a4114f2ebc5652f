"""Synthetic corpora drawn from a ground-truth topic model.

Per document: draw topic proportions h from the model's simplex prior, a
topic index per word position from Multinomial(h), then the word from the
chosen topic's column of A.  Each document gets its own generator spawned
from the master seed, so generation order never matters and regeneration is
byte-identical.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
import scipy.sparse as sp

from .corpus import Corpus
from .decompose import TopicModel
from .nid import NIDModel, sample


@dataclass(frozen=True)
class SynthConfig:
    n_docs: int
    doc_len: int
    seed: int

    def __post_init__(self):
        if self.n_docs < 1:
            raise ValueError("n_docs must be at least 1")
        if self.doc_len < 3:
            raise ValueError("doc_len must be at least 3 so third-order moments exist")


@dataclass
class TopicAssignment:
    """Ground-truth latents of one document."""

    h: np.ndarray
    zeta: np.ndarray

    def __post_init__(self):
        if np.any(self.zeta < 0) or np.any(self.zeta >= self.h.size):
            raise ValueError("topic indices out of range")


def generate(model: TopicModel, cfg: SynthConfig) -> Tuple[Corpus, List[TopicAssignment]]:
    """Sample a corpus and the latent variables that produced it."""
    d, k = model.d, model.k
    a_cum = np.cumsum(model.A, axis=0)
    a_cum[-1, :] = 1.0  # guard rounding in the inverse-CDF lookup
    prior = None if k == 1 else NIDModel(model.family, model.alpha)

    indptr = [0]
    indices: List[np.ndarray] = []
    data: List[np.ndarray] = []
    assignments: List[TopicAssignment] = []

    for i in range(cfg.n_docs):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(i,)))
        if k == 1:
            h = np.array([1.0])
            zeta = np.zeros(cfg.doc_len, dtype=int)
        else:
            h = sample(prior, rng)
            h_cum = np.cumsum(h)
            h_cum[-1] = 1.0
            zeta = np.searchsorted(h_cum, rng.random(cfg.doc_len), side="right")
        u = rng.random(cfg.doc_len)
        words = (a_cum[:, zeta] <= u[None, :]).sum(axis=0)
        counts = np.bincount(words, minlength=d)
        nz = np.nonzero(counts)[0]
        indices.append(nz)
        data.append(counts[nz])
        indptr.append(indptr[-1] + nz.size)
        assignments.append(TopicAssignment(h=h, zeta=zeta))

    mat = sp.csr_matrix(
        (np.concatenate(data), np.concatenate(indices), np.array(indptr)),
        shape=(cfg.n_docs, d))
    return Corpus(mat), assignments
