"""Simple-graph adjacency matrices, labels, and preprocessing.

Adjacency matrices are plain ``numpy`` arrays. Vertex indices are 0-based;
class labels are 1-based integers in ``1..K``.
"""
from dataclasses import dataclass, field

import numpy as np


@dataclass
class LabeledGraph:
    """An adjacency matrix with per-vertex class labels.

    ``provenance`` is free-form metadata (seed, model, contaminated vertex
    sets) that travels with the graph through contamination steps.
    """

    adjacency: np.ndarray
    labels: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.adjacency = np.asarray(self.adjacency, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.adjacency.ndim != 2 or self.adjacency.shape[0] != self.adjacency.shape[1]:
            raise ValueError("adjacency must be square")
        if self.labels.shape != (self.adjacency.shape[0],):
            raise ValueError(
                f"labels length {self.labels.shape} does not match n={self.adjacency.shape[0]}"
            )

    @property
    def n(self):
        return self.adjacency.shape[0]

    def copy(self):
        return LabeledGraph(self.adjacency.copy(), self.labels.copy(), dict(self.provenance))


def validate(A, augmented=False, binary=True):
    """Return a list of invariant violations for a simple-graph adjacency matrix.

    An empty list means the matrix is valid. Each entry is a human-readable
    string naming the violated invariant and the offending index.
    """
    A = np.asarray(A)
    problems = []
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return [f"not square: shape {A.shape}"]
    for i, j in zip(*np.nonzero(A != A.T)):
        if i < j:
            problems.append(f"asymmetric at ({i},{j})")
    if not augmented:
        for i in np.flatnonzero(np.diag(A) != 0):
            problems.append(f"nonzero diagonal at {i}")
    if binary:
        off = A.copy().astype(float)
        if augmented:
            np.fill_diagonal(off, 0)
        for i, j in zip(*np.nonzero((off != 0) & (off != 1))):
            problems.append(f"non-binary entry at ({i},{j})")
    if np.any(A < 0):
        i, j = np.argwhere(A < 0)[0]
        problems.append(f"negative entry at ({i},{j})")
    return problems


def is_valid(A, augmented=False):
    return not validate(A, augmented=augmented)


def preprocess(raw):
    """Binarize, symmetrize (logical OR) and hollow a raw non-negative matrix."""
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {raw.shape}")
    nz = raw > 0
    A = (nz | nz.T).astype(float)
    np.fill_diagonal(A, 0.0)
    return A


def diagonal_augment(A):
    """Impute the diagonal with ``degree / (n - 1)``."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if n < 2:
        raise ValueError("diagonal augmentation needs at least 2 vertices")
    out = A.copy()
    np.fill_diagonal(out, 0.0)
    deg = out.sum(axis=1)
    out[np.diag_indices(n)] = deg / (n - 1)
    return out


def edge_count(A):
    A = np.asarray(A)
    return int(np.count_nonzero(np.triu(A, k=1)))


def density(A):
    """Edge count over ``C(n, 2)``."""
    n = np.asarray(A).shape[0]
    if n < 2:
        raise ValueError("density is undefined for fewer than 2 vertices")
    return edge_count(A) / (n * (n - 1) / 2)


def test_column(A, v):
    """Split vertex ``v`` out of ``A``.

    Returns ``(train, phi, index)`` where ``train`` is ``A`` with row and
    column ``v`` deleted, ``phi`` is column ``v`` without entry ``v``, and
    ``index`` maps positions in ``train`` back to vertex ids in ``A``.
    """
    A = np.asarray(A)
    n = A.shape[0]
    if not 0 <= v < n:
        raise IndexError(f"vertex {v} out of range for n={n}")
    keep = np.delete(np.arange(n), v)
    return A[np.ix_(keep, keep)], A[keep, v].copy(), keep


# keep pytest from collecting the function above when imported into a test module
test_column.__test__ = False


def reinsert(train, phi, v, diag=0.0):
    """Inverse of :func:`test_column`."""
    m = train.shape[0]
    n = m + 1
    out = np.empty((n, n), dtype=np.result_type(train, phi, float))
    keep = np.delete(np.arange(n), v)
    out[np.ix_(keep, keep)] = train
    out[keep, v] = phi
    out[v, keep] = phi
    out[v, v] = diag
    return out


def complement(A):
    A = np.asarray(A, dtype=float)
    out = 1.0 - A
    np.fill_diagonal(out, 0.0)
    return out


def class_counts(labels, K=None):
    labels = np.asarray(labels, dtype=int)
    K = int(labels.max()) if K is None else K
    return np.bincount(labels, minlength=K + 1)[1:]
