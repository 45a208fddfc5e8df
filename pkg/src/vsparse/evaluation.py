"""Leave-one-out evaluation, Monte Carlo replication and parameter sweeps.

Replicate ``r`` of a run with base seed ``b`` draws its graph and its
contamination from the two children of ``numpy.random.SeedSequence((b, r))``.
Every grid value of a sweep reuses the same replicate graphs, so differences
along a curve come from the swept variable alone.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import warnings

import numpy as np

from .classifiers import knn_vote, lda_fit, src_classify_path
from .config import ClassifierSpec, ContaminationSpec, EmbeddingSpec
from .graph import test_column
from .omp import Dictionary
from .sbm import contaminate, sample
from .spectral import ase, eig_sym, select_dimension


class ReplicateError(RuntimeError):
    def __init__(self, replicate, cause):
        self.replicate = replicate
        super().__init__(f"replicate {replicate} failed: {cause}")


@dataclass
class LooResult:
    """Per-vertex leave-one-out predictions.

    ``predictions`` is 0 for excluded folds (a class missing from the training
    split); those folds do not count towards ``error``.
    """

    predictions: np.ndarray
    labels: np.ndarray
    error: float
    chance: float
    descriptor: str
    degenerate: np.ndarray
    excluded: np.ndarray

    @property
    def n_evaluated(self):
        return int((~self.excluded).sum())


@dataclass
class ErrorCurve:
    variable: str
    grid: list
    mean: np.ndarray
    std_error: np.ndarray
    replicates: int
    chance: float
    errors: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float)
        self.std_error = np.asarray(self.std_error, dtype=float)
        if not len(self.grid) == len(self.mean) == len(self.std_error):
            raise ValueError("grid, mean and std_error must have equal length")

    def spread(self):
        return float(self.mean.max() - self.mean.min())


def chance_error(labels):
    """Error of always guessing the most frequent class."""
    labels = np.asarray(labels, dtype=int)
    if labels.size == 0:
        raise ValueError("no labels")
    return 1.0 - np.bincount(labels).max() / labels.size


def excluded_folds(labels):
    """Vertices whose removal leaves their class without training examples."""
    labels = np.asarray(labels, dtype=int)
    counts = np.bincount(labels)
    out = counts[labels] < 2
    if out.any():
        warnings.warn(f"{int(out.sum())} fold(s) excluded: class missing from training split",
                      stacklevel=3)
    return out


def _result(pred, labels, descriptor, degenerate, excluded):
    keep = ~excluded
    wrong = int(np.sum(pred[keep] != labels[keep]))
    err = wrong / keep.sum() if keep.any() else float("nan")
    return LooResult(pred, labels, err, chance_error(labels), descriptor, degenerate, excluded)


def loo_dictionaries(A, labels, normalize=True):
    """Yield ``(v, dictionary, phi)`` for every held-out vertex ``v``.

    Equivalent to :func:`test_column` followed by :func:`build_dictionary`,
    but the columns are sorted by class once and each fold is written into one
    reused buffer. Rows of the dictionary and of ``phi`` follow the same
    class-sorted vertex order, which leaves every inner product, and hence
    OMP, unchanged. A yielded dictionary is only valid until the next one.
    """
    A = np.asarray(A, dtype=float)
    labels = np.asarray(labels, dtype=int)
    n = len(labels)
    order = np.argsort(labels, kind="stable")
    S = A[np.ix_(order, order)]
    sorted_labels = labels[order]
    sq = np.einsum("ij,ij->j", S, S)
    buf = np.empty((n - 1, n - 1))
    for p in range(n):
        v = int(order[p])
        buf[:p, :p] = S[:p, :p]
        buf[:p, p:] = S[:p, p + 1:]
        buf[p:, :p] = S[p + 1:, :p]
        buf[p:, p:] = S[p + 1:, p + 1:]
        norms_sq = np.delete(sq - S[p] ** 2, p)
        zero = norms_sq <= 0
        if normalize:
            buf *= 1.0 / np.sqrt(np.where(zero, 1.0, norms_sq))
        phi = np.delete(S[:, p], p)
        D = Dictionary(buf, np.delete(sorted_labels, p), np.delete(order, p), zero, normalize)
        yield v, D, phi


def loo_src_path(A, labels, s_values, normalize=True, variant="plain"):
    """Leave-one-out SRC errors at several sparsity levels, one OMP run per fold."""
    A = np.asarray(A, dtype=float)
    labels = np.asarray(labels, dtype=int)
    n = len(labels)
    s_values = list(s_values)
    if any(s < 1 for s in s_values):
        raise ValueError("sparsity levels must be positive")
    excluded = excluded_folds(labels)
    preds = np.zeros((len(s_values), n), dtype=int)
    degenerate = np.zeros((len(s_values), n), dtype=bool)
    for v, D, phi in loo_dictionaries(A, labels, normalize):
        if excluded[v]:
            continue
        for i, dec in enumerate(src_classify_path(D, phi, s_values, variant)):
            preds[i, v] = dec.predicted
            degenerate[i, v] = dec.degenerate
    tag = "" if normalize else ",no-l2"
    return [_result(preds[i], labels, f"SRC(s={s},{variant}{tag})", degenerate[i], excluded)
            for i, s in enumerate(s_values)]


def loo_src(A, labels, s=5, normalize=True, variant="plain"):
    return loo_src_path(A, labels, [s], normalize, variant)[0]


def _pairwise(Z):
    return np.linalg.norm(Z[:, None, :] - Z[None, :, :], axis=2)


def loo_knn_path(Z, labels, ks):
    """Leave-one-out kNN on fixed points for several neighbour counts."""
    Z = np.asarray(Z, dtype=float)
    labels = np.asarray(labels, dtype=int)
    n = len(labels)
    excluded = excluded_folds(labels)
    dist = _pairwise(Z)
    np.fill_diagonal(dist, np.inf)
    kmax = max(ks)
    if kmax > n - 1:
        raise ValueError(f"k={kmax} exceeds training size {n - 1}")
    order = np.argsort(dist, axis=1, kind="stable")[:, :kmax]
    out = []
    for k in ks:
        if k == 1:
            pred = labels[order[:, 0]]
        else:
            pred = np.array([knn_vote(labels[order[v, :k]], dist[v, order[v, :k]])
                             for v in range(n)])
        pred = np.where(excluded, 0, pred)
        out.append(_result(pred, labels, f"{k}NN", np.zeros(n, dtype=bool), excluded))
    return out


def loo_lda(Z, labels, ridge=1e-6):
    Z = np.asarray(Z, dtype=float)
    labels = np.asarray(labels, dtype=int)
    n = len(labels)
    excluded = excluded_folds(labels)
    pred = np.zeros(n, dtype=int)
    mask = np.ones(n, dtype=bool)
    for v in range(n):
        if excluded[v]:
            continue
        mask[v] = False
        model = lda_fit(Z[mask], labels[mask], ridge)
        mask[v] = True
        pred[v] = model.predict(Z[v])[0]
    return _result(pred, labels, "LDA", np.zeros(n, dtype=bool), excluded)


def out_of_sample(train_embedding, eig, phi):
    """Project a new adjacency column onto a training embedding's eigenvectors."""
    d = train_embedding.d_hat
    vals = eig.values[:d]
    scale = np.where(vals != 0, np.sign(vals) / np.sqrt(np.abs(np.where(vals == 0, 1, vals))), 0)
    return (eig.vectors[:, :d].T @ phi) * scale


def loo_ase(A, labels, classifier="knn", d_hat=2, k=1, ridge=1e-6, ordering="magnitude",
            strict=False):
    """Leave-one-out kNN or LDA on the adjacency spectral embedding.

    By default the full graph is embedded once. ``strict=True`` embeds the
    training subgraph of each fold and projects the held-out vertex onto it.
    """
    A = np.asarray(A, dtype=float)
    labels = np.asarray(labels, dtype=int)
    n = len(labels)
    if classifier not in ("knn", "lda"):
        raise ValueError(f"unknown ASE classifier {classifier!r}")
    if not 1 <= d_hat <= n:
        raise ValueError(f"d_hat={d_hat} outside [1, {n}]")
    if not strict:
        Z = ase(A, d_hat, ordering).Z
        res = loo_knn_path(Z, labels, [k])[0] if classifier == "knn" else loo_lda(Z, labels, ridge)
    else:
        excluded = excluded_folds(labels)
        pred = np.zeros(n, dtype=int)
        for v in range(n):
            if excluded[v]:
                continue
            train, phi, keep = test_column(A, v)
            eig = eig_sym(train, ordering)
            emb = ase(train, min(d_hat, n - 1), ordering, decomposition=eig)
            z = out_of_sample(emb, eig, phi)
            if classifier == "knn":
                dist = np.linalg.norm(emb.Z - z, axis=1)
                nearest = np.argsort(dist, kind="stable")[:k]
                pred[v] = knn_vote(labels[keep][nearest], dist[nearest])
            else:
                pred[v] = lda_fit(emb.Z, labels[keep], ridge).predict(z)[0]
        res = _result(pred, labels, "", np.zeros(n, dtype=bool), excluded)
    head = f"{k}NN" if classifier == "knn" else "LDA"
    res.descriptor = f"{head}∘ASE(d={d_hat},{ordering}{',strict' if strict else ''})"
    return res


def resolve_d_hat(A, embedding):
    if embedding.d_hat == "auto":
        return select_dimension(A)
    return int(embedding.d_hat)


def evaluate_graph(A, labels, classifier, embedding, variable=None, grid=None):
    """LOO errors of one graph for each value of ``grid``.

    ``variable`` names the swept classifier parameter (``s``, ``d_hat`` or
    ``k``). A variable the classifier does not use gives a constant curve.
    Without a grid a one-element list is returned.
    """
    if grid is None:
        variable = None
    if classifier.type == "src":
        s_vals = list(grid) if variable == "s" else [classifier.s]
        errs = [r.error for r in loo_src_path(A, labels, s_vals, classifier.normalize,
                                                classifier.variant)]
    else:
        d_vals = list(grid) if variable == "d_hat" else [resolve_d_hat(A, embedding)]
        k_vals = list(grid) if variable == "k" and classifier.type == "knn" else [classifier.k]
        errs = []
        if embedding.strict:
            for d in d_vals:
                for k in k_vals:
                    errs.append(loo_ase(A, labels, classifier.type, d, k, classifier.ridge,
                                        embedding.ordering, strict=True).error)
        else:
            full = ase(A, max(d_vals), embedding.ordering)
            for d in d_vals:
                Z = full.truncate(d).Z
                if classifier.type == "knn":
                    errs.extend(r.error for r in loo_knn_path(Z, labels, k_vals))
                else:
                    errs.append(loo_lda(Z, labels, classifier.ridge).error)
    if grid is not None and len(errs) == 1:
        errs = errs * len(grid)
    return errs


def replicate_seeds(base_seed, r):
    graph_seed, contamination_seed = np.random.SeedSequence((base_seed, r)).spawn(2)
    return graph_seed, contamination_seed


def simulate(model, n, contamination, base_seed, r):
    graph_seed, contamination_seed = replicate_seeds(base_seed, r)
    g = sample(model, n, graph_seed)
    g.provenance["seed"] = [base_seed, r]
    if contamination is not None and contamination.type != "none":
        g = contaminate(g, contamination.type, contamination.rate, contamination_seed)
    return g


def _replicate_errors(r, model, n, contamination, classifier, embedding, variable, grid,
                      base_seed):
    try:
        if variable == "rate":
            if contamination.type == "none":
                raise ValueError("rate sweep needs a contamination type")
            errs, chance = [], None
            for rate in grid:
                spec = ContaminationSpec(contamination.type, rate)
                g = simulate(model, n, spec, base_seed, r)
                errs += evaluate_graph(g.adjacency, g.labels, classifier, embedding)
                chance = chance_error(g.labels)
            return errs, chance
        if variable == "n":
            errs = []
            for m in grid:
                g = simulate(model, m, contamination, base_seed, r)
                errs += evaluate_graph(g.adjacency, g.labels, classifier, embedding)
            return errs, chance_error(g.labels)
        g = simulate(model, n, contamination, base_seed, r)
        errs = evaluate_graph(g.adjacency, g.labels, classifier, embedding, variable, grid)
        return errs, chance_error(g.labels)
    except Exception as e:
        raise ReplicateError(r, e) from e


def _curve(variable, grid, errors, chances):
    errors = np.asarray(errors, dtype=float)
    R = errors.shape[0]
    mean = errors.mean(axis=0)
    se = errors.std(axis=0, ddof=1) / np.sqrt(R) if R > 1 else np.zeros(errors.shape[1])
    return ErrorCurve(variable, list(grid), mean, se, R, float(np.mean(chances)), errors)


def sweep(model, n, variable, grid, contamination=None, classifier=None, embedding=None,
          replicates=100, base_seed=0, threads=1):
    """Monte Carlo error curve along one variable (``s``, ``d_hat``, ``k``, ``rate`` or ``n``).

    Replicates are independent and may run on ``threads`` workers; results are
    always reduced in replicate order, so the output does not depend on it.
    """
    if not grid:
        raise ValueError("empty sweep grid")
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    contamination = contamination or ContaminationSpec()
    classifier = classifier or ClassifierSpec()
    embedding = embedding or EmbeddingSpec()
    grid = list(grid)

    def run(r):
        return _replicate_errors(r, model, n, contamination, classifier, embedding,
                                 variable, grid, base_seed)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(run, range(replicates)))
    else:
        results = [run(r) for r in range(replicates)]
    return _curve(variable, grid, [e for e, _ in results], [c for _, c in results])


def monte_carlo(model, n, contamination=None, classifier=None, embedding=None,
                replicates=100, base_seed=0, threads=1):
    """Mean LOO error over replicates, as a one-point curve over ``n``."""
    return sweep(model, n, "n", [n], contamination, classifier, embedding, replicates,
                 base_seed, threads)


def sweep_graph(A, labels, variable, grid, classifier=None, embedding=None):
    """Error curve of a single fixed graph (real data): no replication."""
    classifier = classifier or ClassifierSpec()
    embedding = embedding or EmbeddingSpec()
    if variable not in ("s", "d_hat", "k"):
        raise ValueError(f"cannot sweep {variable!r} on a fixed graph")
    errs = evaluate_graph(A, labels, classifier, embedding, variable, list(grid))
    return _curve(variable, grid, [errs], [chance_error(labels)])
