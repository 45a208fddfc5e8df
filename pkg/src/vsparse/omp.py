"""Class-ordered dictionaries and orthogonal matching pursuit."""
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.optimize import nnls

RESIDUAL_TOL = 1e-10
# a residual this orthogonal to every remaining atom cannot be reduced further
CORRELATION_TOL = 1e-12
JITTER = 1e-12


@dataclass
class Dictionary:
    """Unit-norm columns grouped by class.

    ``index[j]`` is the original column of atom ``j``; ``class_of`` is
    non-decreasing; ``zero[j]`` marks atoms that were all-zero before
    normalization and are never selected.
    """

    columns: np.ndarray
    class_of: np.ndarray
    index: np.ndarray
    zero: np.ndarray
    normalized: bool = True

    @property
    def n_atoms(self):
        return self.columns.shape[1]

    @property
    def classes(self):
        return np.unique(self.class_of)


@dataclass
class SparseRepresentation:
    support: list
    beta: np.ndarray
    residual_norm: float
    residual_history: list = field(default_factory=list)
    path: list | None = None
    no_positive: bool = False

    def coefficients_at(self, s):
        """Coefficients after ``min(s, len(support))`` greedy steps."""
        if self.path is None:
            raise ValueError("representation was computed without path=True")
        if not self.path:
            return np.zeros_like(self.beta)
        return self.path[min(s, len(self.path)) - 1]


def build_dictionary(A_train, labels, normalize=True):
    """Re-arrange the columns of ``A_train`` by class and scale them to unit norm.

    Columns are sorted by label with ties kept in original order.
    """
    A_train = np.asarray(A_train, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if A_train.shape[1] != len(labels):
        raise ValueError("one label per column required")
    order = np.argsort(labels, kind="stable")
    cols = A_train[:, order]
    norms = np.sqrt(np.einsum("ij,ij->j", cols, cols))
    zero = norms == 0
    if normalize:
        cols = cols / np.where(zero, 1.0, norms)
    return Dictionary(cols, labels[order], order, zero, normalize)


def _as_dictionary(D):
    if isinstance(D, Dictionary):
        return D.columns, D.zero
    D = np.asarray(D, dtype=float)
    return D, np.zeros(D.shape[1], dtype=bool)


def _least_squares(Ds, phi):
    G = Ds.T @ Ds
    b = Ds.T @ phi
    try:
        return cho_solve(cho_factor(G), b)
    except LinAlgError:
        G = G + JITTER * np.eye(len(G))
        return cho_solve(cho_factor(G), b)


def omp(D, phi, s, nonnegative=False, eps=None, path=False):
    """Greedy sparse approximation of ``phi`` with at most ``s`` atoms.

    Each step adds the atom with the largest absolute correlation with the
    current residual (lowest index on ties) and refits all selected
    coefficients by least squares. The loop ends after ``s`` steps, when the
    residual norm drops below ``1e-10`` (or ``eps`` when given), or when no
    remaining atom correlates with the residual.

    With ``nonnegative=True`` only positively correlated atoms are eligible and
    the refit is a non-negative least squares problem.

    ``phi`` is scaled to unit norm first. ``D`` is a :class:`Dictionary` or a
    plain matrix whose columns are the atoms.
    """
    if s < 1:
        raise ValueError("sparsity s must be at least 1")
    cols, zero = _as_dictionary(D)
    if zero.all():
        raise ValueError("dictionary has no usable atoms")
    phi = np.asarray(phi, dtype=float)
    nrm = np.linalg.norm(phi)
    if nrm > 0:
        phi = phi / nrm
    n_atoms = cols.shape[1]
    stop = RESIDUAL_TOL if eps is None else max(eps, RESIDUAL_TOL)

    support = []
    beta = np.zeros(n_atoms)
    coef = np.zeros(0)
    r = phi.copy()
    history = [float(np.linalg.norm(r))]
    betas = []
    available = ~zero
    no_positive = False

    for _ in range(min(s, int(available.sum()))):
        if history[-1] < stop:
            break
        corr = cols.T @ r
        score = corr if nonnegative else np.abs(corr)
        score = np.where(available, score, -np.inf)
        j = int(np.argmax(score))
        if score[j] <= CORRELATION_TOL:
            no_positive = nonnegative and not support
            break
        support.append(j)
        available[j] = False
        Ds = cols[:, support]
        coef = nnls(Ds, phi)[0] if nonnegative else _least_squares(Ds, phi)
        r = phi - Ds @ coef
        history.append(float(np.linalg.norm(r)))
        if path:
            b = np.zeros(n_atoms)
            b[support] = coef
            betas.append(b)

    beta[support] = coef
    return SparseRepresentation(support, beta, history[-1], history,
                                betas if path else None, no_positive)


def omp_nonnegative(D, phi, s, eps=None, path=False):
    return omp(D, phi, s, nonnegative=True, eps=eps, path=path)
