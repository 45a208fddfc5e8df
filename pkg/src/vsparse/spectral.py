"""Symmetric eigendecomposition, adjacency spectral embedding, scree data and
profile-likelihood elbow selection."""
from dataclasses import dataclass

import numpy as np

ORDERINGS = ("magnitude", "algebraic")

SYMMETRY_TOL = 1e-10
VARIANCE_FLOOR = 1e-12


@dataclass
class EigenDecomposition:
    values: np.ndarray
    vectors: np.ndarray
    ordering: str

    def reconstruct(self):
        return (self.vectors * self.values) @ self.vectors.T


@dataclass
class Embedding:
    """Estimated latent positions, one row per vertex.

    ``values`` holds the signed eigenvalues behind each column; ``zero_columns``
    marks columns whose eigenvalue was exactly zero.
    """

    Z: np.ndarray
    values: np.ndarray
    ordering: str
    zero_columns: np.ndarray

    @property
    def d_hat(self):
        return self.Z.shape[1]

    @property
    def signs(self):
        return np.sign(self.values).astype(int)

    def truncate(self, d_hat):
        if not 1 <= d_hat <= self.d_hat:
            raise ValueError(f"d_hat={d_hat} outside [1, {self.d_hat}]")
        return Embedding(self.Z[:, :d_hat], self.values[:d_hat], self.ordering,
                         self.zero_columns[:d_hat])


@dataclass
class ScreeData:
    values: np.ndarray
    ordering: str

    @property
    def magnitudes(self):
        return np.abs(self.values)

    @property
    def signs(self):
        return np.sign(self.values).astype(int)


def _check_ordering(ordering):
    if ordering not in ORDERINGS:
        raise ValueError(f"ordering must be one of {ORDERINGS}, got {ordering!r}")


def _order(values, ordering):
    key = np.abs(values) if ordering == "magnitude" else values
    # lexsort: last key is primary -> descending key, then ascending index
    return np.lexsort((np.arange(len(values)), -key))


def eig_sym(M, ordering="algebraic"):
    """Full eigendecomposition of a symmetric matrix, sorted descending.

    Ties in the sort key are broken by ascending position in the ``eigh``
    output, so the result is deterministic for a given input.
    """
    _check_ordering(ordering)
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if M.size and np.max(np.abs(M - M.T)) > SYMMETRY_TOL * scale:
        raise ValueError("matrix is not symmetric")
    values, vectors = np.linalg.eigh((M + M.T) / 2)
    idx = _order(values, ordering)
    return EigenDecomposition(values[idx], vectors[:, idx], ordering)


def numerical_rank(M, tol=None):
    """Rank with singular values below ``n * eps * sigma_max`` treated as zero."""
    s = np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    if tol is None:
        tol = max(np.shape(M)) * np.finfo(float).eps * s[0]
    return int(np.sum(s > tol))


def inertia(M, tol=None):
    """``(n_positive, n_negative, n_zero)`` eigenvalue counts of a symmetric matrix."""
    vals = np.linalg.eigvalsh(np.asarray(M, dtype=float))
    if tol is None:
        tol = len(vals) * np.finfo(float).eps * max(np.max(np.abs(vals)), 0.0) if len(vals) else 0.0
    pos = int(np.sum(vals > tol))
    neg = int(np.sum(vals < -tol))
    return pos, neg, len(vals) - pos - neg


def ase(A, d_hat, ordering="magnitude", decomposition=None):
    """Adjacency spectral embedding into ``d_hat`` dimensions.

    Column ``i`` of the result is the ``i``-th selected eigenvector scaled by
    the square root of the eigenvalue's magnitude. With ``ordering="algebraic"``
    the largest signed eigenvalues are kept; with ``"magnitude"`` the largest
    absolute ones, so negative eigenvalues can contribute columns.
    """
    _check_ordering(ordering)
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if not 1 <= d_hat <= n:
        raise ValueError(f"d_hat={d_hat} outside [1, {n}]")
    if decomposition is None or decomposition.ordering != ordering:
        decomposition = eig_sym(A, ordering)
    vals = decomposition.values[:d_hat]
    vecs = decomposition.vectors[:, :d_hat]
    Z = vecs * np.sqrt(np.abs(vals))
    return Embedding(Z, vals.copy(), ordering, vals == 0)


def scree(A, top_m=None, ordering="magnitude"):
    _check_ordering(ordering)
    A = np.asarray(A, dtype=float)
    values = np.linalg.eigvalsh((A + A.T) / 2)
    values = values[_order(values, ordering)]
    if top_m is not None:
        if top_m < 1:
            raise ValueError("top_m must be positive")
        values = values[:top_m]
    return ScreeData(values, ordering)


def profile_loglik(values):
    """Profile log-likelihood of every split point of a sorted sequence.

    Entry ``q - 1`` holds the log-likelihood of modelling ``values[:q]`` and
    ``values[q:]`` as normal samples with their own means and a common
    variance, for ``q = 1 .. len(values) - 1``.
    """
    x = np.asarray(values, dtype=float)
    p = len(x)
    # two-pass sums per split; running-sum shortcuts leave rounding noise on flat runs
    ss = np.array([((x[:q] - x[:q].mean()) ** 2).sum() + ((x[q:] - x[q:].mean()) ** 2).sum()
                   for q in range(1, p)])
    var = np.maximum(ss / max(p - 2, 1), VARIANCE_FLOOR)
    return -0.5 * p * np.log(2 * np.pi * var) - ss / (2 * var)


def _first_elbow(x):
    ll = profile_loglik(x)
    return int(np.argmax(ll)) + 1


def profile_likelihood_elbow(values, which_elbow=1):
    """Elbow of a descending scree sequence by profile likelihood.

    ``which_elbow=2`` repeats the search on the values past the first elbow
    and returns the cumulative position. When fewer than two values remain
    for the second search, the sequence length is returned.
    """
    if which_elbow not in (1, 2):
        raise ValueError("which_elbow must be 1 or 2")
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or len(x) < 3:
        raise ValueError("need at least 3 values")
    first = _first_elbow(x)
    if which_elbow == 1:
        return first
    tail = x[first:]
    if len(tail) < 2:
        return len(x)
    return first + _first_elbow(tail)


def select_dimension(A, top_m=None, which_elbow=1, ordering="magnitude"):
    """Embedding dimension from the scree of ``A``.

    The default uses eigenvalue magnitudes; ``ordering="algebraic"`` runs the
    elbow search on the signed spectrum instead.
    """
    sc = scree(A, top_m, ordering)
    values = sc.magnitudes if ordering == "magnitude" else sc.values
    return profile_likelihood_elbow(values, which_elbow)


def procrustes(X, Y):
    """Orthogonal matrix ``R`` minimising ``||X R - Y||_F``."""
    U, _, Vt = np.linalg.svd(X.T @ Y)
    return U @ Vt
