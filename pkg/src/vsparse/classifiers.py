"""Vertex classifiers: sparse representation (SRC), kNN and LDA.

All ties resolve to the lowest class index so results are reproducible.
"""
from dataclasses import dataclass

import numpy as np

from .omp import SparseRepresentation, omp


@dataclass
class SrcDecision:
    predicted: int
    residuals: np.ndarray
    classes: np.ndarray
    representation: SparseRepresentation | None
    degenerate: bool = False


def majority_class(labels):
    classes, counts = np.unique(np.asarray(labels, dtype=int), return_counts=True)
    return int(classes[np.argmax(counts)])


def class_residuals(D, phi, beta, classes):
    """``||phi - D beta_k||`` for each class, using only the atoms of class ``k``."""
    out = np.empty(len(classes))
    nz = np.flatnonzero(beta)
    for i, k in enumerate(classes):
        idx = nz[D.class_of[nz] == k]
        out[i] = np.linalg.norm(phi - D.columns[:, idx] @ beta[idx])
    return out


def _decide(D, phi, beta, rep, classes):
    res = class_residuals(D, phi, beta, classes)
    return SrcDecision(int(classes[np.argmin(res)]), res, classes, rep)


def _degenerate(D, phi, rep, classes):
    res = np.full(len(classes), float(np.linalg.norm(phi)))
    return SrcDecision(majority_class(D.class_of), res, classes, rep, degenerate=True)


def src_classify(D, phi, s, variant="plain"):
    """Classify a test column by the class whose coefficients best rebuild it.

    A zero test column, or one for which no atom can be selected, falls back to
    the majority training class and is marked ``degenerate``.
    """
    return src_classify_path(D, phi, [s], variant)[0]


def src_classify_path(D, phi, s_values, variant="plain"):
    """:func:`src_classify` for several sparsity levels from one greedy run.

    Greedy selection is nested, so the decision at sparsity ``s`` uses the
    coefficients after step ``s`` of a run to ``max(s_values)``.
    """
    if variant not in ("plain", "nonnegative"):
        raise ValueError(f"unknown SRC variant {variant!r}")
    classes = D.classes
    phi = np.asarray(phi, dtype=float)
    nrm = np.linalg.norm(phi)
    if nrm == 0 or D.zero.all():
        return [_degenerate(D, phi, None, classes) for _ in s_values]
    phi = phi / nrm
    rep = omp(D, phi, max(s_values), nonnegative=variant == "nonnegative", path=True)
    if not rep.support:
        return [_degenerate(D, phi, rep, classes) for _ in s_values]
    return [_decide(D, phi, rep.coefficients_at(s), rep, classes) for s in s_values]


@dataclass
class KnnModel:
    points: np.ndarray
    labels: np.ndarray
    k: int = 1


def knn_fit(points, labels, k=1):
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    labels = np.asarray(labels, dtype=int)
    if len(points) == 0:
        raise ValueError("empty training set")
    if not 1 <= k <= len(points):
        raise ValueError(f"k={k} must lie in [1, {len(points)}]")
    return KnnModel(points, labels, k)


def knn_vote(neighbor_labels, neighbor_dists):
    """Majority vote; ties go to the smaller summed distance, then lower class."""
    classes, inv, counts = np.unique(neighbor_labels, return_inverse=True, return_counts=True)
    totals = np.bincount(inv, weights=neighbor_dists)
    best = np.lexsort((classes, totals, -counts))[0]
    return int(classes[best])


def knn_classify(model, z):
    z = np.atleast_1d(np.asarray(z, dtype=float))
    d = np.linalg.norm(model.points - z, axis=1)
    nearest = np.argsort(d, kind="stable")[:model.k]
    return knn_vote(model.labels[nearest], d[nearest])


@dataclass
class LdaModel:
    classes: np.ndarray
    means: np.ndarray
    covariance: np.ndarray
    log_priors: np.ndarray

    def __post_init__(self):
        self._w = np.linalg.solve(self.covariance, self.means.T)
        self._b = -0.5 * np.einsum("kd,dk->k", self.means, self._w) + self.log_priors

    def decision_function(self, Z):
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        return Z @ self._w + self._b

    def predict(self, Z):
        return self.classes[np.argmax(self.decision_function(Z), axis=1)]


def lda_fit(points, labels, ridge=1e-6):
    """Linear discriminant analysis with a ridge-regularised pooled covariance.

    The ridge adds ``ridge * trace(S) / d`` to the diagonal of the pooled
    within-class covariance ``S``. When ``S`` vanishes (e.g. one point per
    class) the total scatter sets the ridge scale instead.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(labels, dtype=int)
    n, d = X.shape
    if n < 2:
        raise ValueError("LDA needs at least 2 points")
    classes, inv, counts = np.unique(y, return_inverse=True, return_counts=True)
    means = np.zeros((len(classes), d))
    np.add.at(means, inv, X)
    means /= counts[:, None]
    centered = X - means[inv]
    S = centered.T @ centered / max(n - len(classes), 1)
    scale = np.trace(S) / d
    if scale <= 0:
        total = X - X.mean(axis=0)
        scale = np.trace(total.T @ total) / (n * d)
    if scale <= 0:
        raise ValueError("singular covariance: training points are all identical")
    S = S + ridge * scale * np.eye(d)
    if np.linalg.matrix_rank(S) < d:
        raise ValueError("singular covariance after ridge")
    return LdaModel(classes, means, S, np.log(counts / n))


def lda_classify(model, z):
    return int(model.predict(z)[0])
