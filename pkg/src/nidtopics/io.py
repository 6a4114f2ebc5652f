"""File formats: UCI bag-of-words corpora, topic models, ground-truth latents.

The corpus format is three header lines (document count D, vocabulary size
W, number of triples NNZ) followed by one ``docID wordID count`` triple per
line, all 1-indexed on disk and 0-indexed in memory.  Writing then reading
reproduces the corpus exactly.

Topic models are TSV with a versioned tag line so future fields stay
readable; columns of A are written one per line (column-major), with floats
emitted via repr for lossless round trips.
"""
from __future__ import annotations

from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .corpus import Corpus
from .decompose import TopicModel
from .families import parse_family
from .synth import TopicAssignment

MODEL_TAG = "nid-topic-model"
MODEL_VERSION = 1


class FormatError(ValueError):
    """Malformed file, with the offending line number where possible."""


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# UCI bag-of-words


def read_uci(path) -> Corpus:
    path = Path(path)
    with open(path, "r") as fh:
        lines = fh.read().splitlines()
    if len(lines) < 3:
        raise FormatError(f"{path}: expected 3 header lines (D, W, NNZ)")

    def header(i: int) -> int:
        try:
            val = int(lines[i].strip())
        except ValueError:
            raise FormatError(f"{path}:{i + 1}: bad header line {lines[i]!r}") from None
        if val < 0:
            raise FormatError(f"{path}:{i + 1}: negative header value")
        return val

    n_docs, d, nnz = header(0), header(1), header(2)
    if len(lines) - 3 < nnz:
        raise FormatError(f"{path}: header promises {nnz} triples, "
                          f"found {len(lines) - 3}")
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    data = np.empty(nnz, dtype=np.int64)
    for i in range(nnz):
        lineno = i + 4
        parts = lines[i + 3].split()
        if len(parts) != 3:
            raise FormatError(f"{path}:{lineno}: expected 'docID wordID count'")
        try:
            doc, word, count = (int(p) for p in parts)
        except ValueError:
            raise FormatError(f"{path}:{lineno}: non-integer field") from None
        if not 1 <= doc <= n_docs:
            raise FormatError(f"{path}:{lineno}: docID {doc} outside 1..{n_docs}")
        if not 1 <= word <= d:
            raise FormatError(f"{path}:{lineno}: wordID {word} outside 1..{d} "
                              "(ids are 1-indexed on disk)")
        if count <= 0:
            raise FormatError(f"{path}:{lineno}: count must be positive")
        rows[i], cols[i], data[i] = doc - 1, word - 1, count
    mat = sp.csr_matrix((data, (rows, cols)), shape=(n_docs, d), dtype=np.int64)
    return Corpus(mat)


def write_uci(corpus: Corpus, path) -> None:
    mat = corpus.counts.tocoo()
    order = np.lexsort((mat.col, mat.row))
    with open(path, "w") as fh:
        fh.write(f"{corpus.n_docs}\n{corpus.d}\n{mat.nnz}\n")
        for i in order:
            fh.write(f"{mat.row[i] + 1} {mat.col[i] + 1} {mat.data[i]}\n")


def read_vocab(path) -> List[str]:
    with open(path, "r") as fh:
        return [line.rstrip("\n") for line in fh if line.strip()]


def write_vocab(vocab: Sequence[str], path) -> None:
    with open(path, "w") as fh:
        for token in vocab:
            fh.write(f"{token}\n")


# ---------------------------------------------------------------------------
# topic models


def write_topic_model(model: TopicModel, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"#{MODEL_TAG} v{MODEL_VERSION}\n")
        fh.write(f"d\t{model.d}\n")
        fh.write(f"k\t{model.k}\n")
        fh.write(f"family\t{model.family.spec()}\n")
        fh.write("alpha\t" + "\t".join(_fmt(a) for a in model.alpha) + "\n")
        for j in range(model.k):
            fh.write("topic\t" + "\t".join(_fmt(x) for x in model.A[:, j]) + "\n")


def read_topic_model(path) -> TopicModel:
    path = Path(path)
    with open(path, "r") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith(f"#{MODEL_TAG} v"):
        raise FormatError(f"{path}:1: missing '{MODEL_TAG}' format tag")
    try:
        version = int(lines[0].split("v")[-1])
    except ValueError:
        raise FormatError(f"{path}:1: unreadable version") from None
    if version > MODEL_VERSION:
        raise FormatError(f"{path}: format version {version} is newer than supported "
                          f"{MODEL_VERSION}")
    fields = {}
    topics = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        key, _, rest = line.partition("\t")
        if key == "topic":
            topics.append(np.array([float(x) for x in rest.split("\t")]))
        else:
            fields[key] = rest
    for needed in ("d", "k", "family", "alpha"):
        if needed not in fields:
            raise FormatError(f"{path}: missing '{needed}' field")
    d, k = int(fields["d"]), int(fields["k"])
    family = parse_family(fields["family"])
    alpha = np.array([float(x) for x in fields["alpha"].split("\t")])
    if len(topics) != k:
        raise FormatError(f"{path}: expected {k} topic lines, found {len(topics)}")
    A = np.column_stack(topics)
    if A.shape != (d, k):
        raise FormatError(f"{path}: topic lines have wrong length for d={d}")
    return TopicModel(A=A, alpha=alpha, family=family)


# ---------------------------------------------------------------------------
# ground-truth sidecar for synthetic corpora


def write_ground_truth(assignments: Sequence[TopicAssignment], path) -> None:
    """TSV: docID, comma-joined h, comma-joined topic indices."""
    with open(path, "w") as fh:
        fh.write("doc\th\tzeta\n")
        for i, ta in enumerate(assignments):
            h = ",".join(_fmt(x) for x in ta.h)
            z = ",".join(str(int(t)) for t in ta.zeta)
            fh.write(f"{i}\t{h}\t{z}\n")


def read_ground_truth(path) -> List[TopicAssignment]:
    out = []
    with open(path, "r") as fh:
        header = fh.readline()
        if not header.startswith("doc\t"):
            raise FormatError(f"{path}:1: missing ground-truth header")
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3:
                raise FormatError(f"{path}:{lineno}: expected 3 columns")
            h = np.array([float(x) for x in parts[1].split(",")])
            zeta = np.array([int(x) for x in parts[2].split(",")], dtype=int)
            out.append(TopicAssignment(h=h, zeta=zeta))
    return out
