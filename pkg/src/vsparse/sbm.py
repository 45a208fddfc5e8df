"""Stochastic blockmodels: parameters, sampling, contamination and the
moment-based consistency condition for sparse representation classification.
"""
from dataclasses import dataclass
import json

import numpy as np

from .graph import LabeledGraph
from .spectral import inertia, numerical_rank

SIMPLEX_TOL = 1e-12


@dataclass
class BlockModel:
    """SBM parameters: symmetric block probability matrix ``B`` and prior ``pi``.

    A prior with zero entries is accepted (``degenerate`` is then true) so that
    contaminated models at rates 0 and 1 remain representable.
    """

    B: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        self.B = np.atleast_2d(np.asarray(self.B, dtype=float))
        self.pi = np.atleast_1d(np.asarray(self.pi, dtype=float))
        K = self.B.shape[0]
        if self.B.shape != (K, K):
            raise ValueError(f"B must be square, got shape {self.B.shape}")
        if not np.allclose(self.B, self.B.T, rtol=0, atol=1e-12):
            raise ValueError("B must be symmetric")
        if np.any(self.B < 0) or np.any(self.B > 1):
            raise ValueError("B entries must lie in [0, 1]")
        if self.pi.shape != (K,):
            raise ValueError(f"pi must have length K={K}")
        if np.any(self.pi < 0) or abs(self.pi.sum() - 1) > SIMPLEX_TOL:
            raise ValueError("pi must lie on the unit simplex")

    @property
    def K(self):
        return self.B.shape[0]

    @property
    def degenerate(self):
        return bool(np.any(self.pi == 0))

    def to_dict(self):
        return {"K": self.K, "B": self.B.tolist(), "pi": self.pi.tolist()}

    @classmethod
    def from_dict(cls, d):
        model = cls(d["B"], d["pi"])
        if "K" in d and int(d["K"]) != model.K:
            raise ValueError(f"K={d['K']} does not match B of size {model.K}")
        return model

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def sim_params():
    """Two-block model used throughout the simulation experiments."""
    return BlockModel([[0.7, 0.32], [0.32, 0.75]], [0.4, 0.6])


@dataclass
class MomentTable:
    m1: np.ndarray
    m2: np.ndarray
    cross: np.ndarray
    rho: np.ndarray


@dataclass
class ConditionReport:
    """Outcome of the SRC consistency condition for every ordered block pair.

    ``lhs[q, r]`` and ``rhs[q, r]`` are the two sides of the strict
    inequality; ``pairwise[q, r]`` is ``lhs < rhs`` (diagonal left true).
    """

    pairwise: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    satisfied_for_class: np.ndarray
    overall: bool

    def failing_pairs(self):
        """1-based ``(q, r)`` pairs where the inequality fails."""
        return [(int(q) + 1, int(r) + 1) for q, r in zip(*np.nonzero(~self.pairwise))]

    def to_dict(self):
        return {
            "overall": bool(self.overall),
            "satisfied_for_class": [bool(x) for x in self.satisfied_for_class],
            "pairwise": self.pairwise.tolist(),
            "lhs": self.lhs.tolist(),
            "rhs": self.rhs.tolist(),
            "failing_pairs": [list(p) for p in self.failing_pairs()],
        }


@dataclass
class LatentPositions:
    """``nu`` with ``B = nu @ nu.T`` when ``B`` is PSD, else ``None``."""

    nu: np.ndarray | None
    d: int
    inertia: tuple


def make_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def communication_matrix(model, labels):
    labels = np.asarray(labels, dtype=int)
    if labels.size and (labels.min() < 1 or labels.max() > model.K):
        raise ValueError(f"labels must lie in 1..{model.K}")
    idx = labels - 1
    return model.B[np.ix_(idx, idx)]


def sample_adjacency(P, rng):
    """Independent Bernoulli edges above the diagonal, mirrored below."""
    n = P.shape[0]
    iu = np.triu_indices(n, k=1)
    A = np.zeros((n, n))
    A[iu] = rng.random(len(iu[0])) < P[iu]
    return A + A.T


def sample(model, n, seed=None):
    """Draw an ``n``-vertex graph from ``model``.

    Labels are drawn first, then the upper-triangle edges in row-major order,
    both from one ``numpy`` PCG64 generator seeded by ``seed``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = make_rng(seed)
    labels = rng.choice(model.K, size=n, p=model.pi) + 1
    A = sample_adjacency(communication_matrix(model, labels), rng)
    return LabeledGraph(A, labels, {"model": model.to_dict(), "n": n,
                                    "seed": seed if isinstance(seed, int) else None,
                                    "contamination": []})


def occlude_model(model, rate):
    if not 0 <= rate <= 1:
        raise ValueError("rate must lie in [0, 1]")
    B = model.B
    B_occ = np.block([[B, B], [B, np.zeros_like(B)]])
    return BlockModel(B_occ, np.concatenate([(1 - rate) * model.pi, rate * model.pi]))


def reverse_model(model, rate):
    if not 0 <= rate <= 1:
        raise ValueError("rate must lie in [0, 1]")
    B = model.B
    B_rev = np.block([[B, B], [B, 1.0 - B]])
    return BlockModel(B_rev, np.concatenate([(1 - rate) * model.pi, rate * model.pi]))


def contaminated_count(n, rate):
    """``round(rate * n)`` with halves rounded up."""
    return int(np.floor(rate * n + 0.5))


def select_vertices(n, rate, seed):
    """The first ``round(rate * n)`` entries of a seeded random permutation.

    For a fixed seed the selected sets are nested in ``rate``.
    """
    if not 0 <= rate <= 1:
        raise ValueError("rate must lie in [0, 1]")
    perm = make_rng(seed).permutation(n)
    return np.sort(perm[:contaminated_count(n, rate)])


def _contaminate(g, rate, seed, kind, vertices=None):
    if vertices is None:
        vertices = select_vertices(g.n, rate, seed)
    vertices = np.asarray(vertices, dtype=int)
    out = g.copy()
    A = out.adjacency
    ix = np.ix_(vertices, vertices)
    if kind == "occlusion":
        A[ix] = 0.0
    else:
        A[ix] = 1.0 - A[ix]
        A[vertices, vertices] = 0.0
    out.provenance["contamination"] = list(g.provenance.get("contamination", [])) + [
        {"type": kind, "rate": rate, "vertices": vertices.tolist()}
    ]
    return out


def occlude_graph(g, rate, seed=None, vertices=None):
    """Remove every edge among a random ``round(rate * n)``-vertex subset."""
    return _contaminate(g, rate, seed, "occlusion", vertices)


def reverse_graph(g, rate, seed=None, vertices=None):
    """Complement the edges among a random ``round(rate * n)``-vertex subset."""
    return _contaminate(g, rate, seed, "reversion", vertices)


def mixed_contaminate(g, rate, seed=None):
    """Occlude, then reverse an independently drawn subset at the same rate."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    s_occ, s_rev = ss.spawn(2)
    return reverse_graph(occlude_graph(g, rate, s_occ), rate, s_rev)


CONTAMINATIONS = {
    "none": None,
    "occlusion": occlude_graph,
    "reversion": reverse_graph,
    "mixed": mixed_contaminate,
}


def contaminate(g, kind, rate, seed=None):
    if kind not in CONTAMINATIONS:
        raise ValueError(f"unknown contamination {kind!r}")
    if kind == "none":
        return g
    return CONTAMINATIONS[kind](g, rate, seed)


def contaminated_blocks(g, K):
    """Block index in the ``2K``-block contaminated model, 1-based.

    A vertex of class ``k`` maps to ``k`` if untouched and ``k + K`` if it lies
    in the most recent contaminated set.
    """
    blocks = g.labels.copy()
    records = g.provenance.get("contamination", [])
    if records:
        blocks[np.asarray(records[-1]["vertices"], dtype=int)] += K
    return blocks


def moments(model):
    """Moments of ``Q_q = sum_k 1{Y=k} B[k, q]`` with ``Y ~ pi``."""
    B, pi = model.B, model.pi
    m1 = pi @ B
    m2 = pi @ B ** 2
    cross = B.T @ (pi[:, None] * B)
    if np.any(m2 == 0):
        q = int(np.flatnonzero(m2 == 0)[0]) + 1
        raise ValueError(f"block column {q} has zero second moment; correlation undefined")
    rho = cross / np.sqrt(np.outer(m2, m2))
    np.fill_diagonal(rho, 1.0)
    return MomentTable(m1, m2, cross, rho)


def check_src_condition(model):
    """Evaluate ``rho_qr^2 * E(Q_r^2)/E(Q_q^2) < E(Q_r)/E(Q_q)`` for all ``r != q``."""
    mt = moments(model)
    lhs = mt.rho ** 2 * (mt.m2[None, :] / mt.m2[:, None])
    with np.errstate(divide="ignore", invalid="ignore"):
        rhs = mt.m1[None, :] / mt.m1[:, None]
    pairwise = lhs < rhs
    np.fill_diagonal(pairwise, True)
    per_class = pairwise.all(axis=1)
    return ConditionReport(pairwise, lhs, rhs, per_class, bool(per_class.all()))


def asymptotic_correlations(model):
    """Almost-sure limits of adjacency column correlations by class pair.

    Diagonal: ``E(Q_q^2)/E(Q_q)``; off-diagonal: ``E(Q_q Q_r)/sqrt(E(Q_q)E(Q_r))``.
    """
    mt = moments(model)
    if np.any(mt.m1 == 0):
        raise ValueError("zero first moment")
    out = mt.cross / np.sqrt(np.outer(mt.m1, mt.m1))
    np.fill_diagonal(out, mt.m2 / mt.m1)
    return out


def empirical_correlations(A, labels, K=None):
    """Mean un-centred correlation between distinct adjacency columns by class pair.

    Columns with zero norm are skipped.
    """
    A = np.asarray(A, dtype=float)
    labels = np.asarray(labels, dtype=int)
    K = int(labels.max()) if K is None else K
    norms = np.sqrt(np.einsum("ij,ij->j", A, A))
    G = A.T @ A
    ok = norms > 0
    out = np.full((K, K), np.nan)
    for q in range(1, K + 1):
        iq = np.flatnonzero((labels == q) & ok)
        for r in range(q, K + 1):
            ir = np.flatnonzero((labels == r) & ok)
            C = G[np.ix_(iq, ir)] / np.outer(norms[iq], norms[ir])
            if q == r:
                m = len(iq)
                if m < 2:
                    continue
                val = (C.sum() - np.trace(C)) / (m * (m - 1))
            else:
                if C.size == 0:
                    continue
                val = C.mean()
            out[q - 1, r - 1] = out[r - 1, q - 1] = val
    return out


def block_latent_positions(model):
    """Point-mass latent positions ``nu`` (rows) with ``nu @ nu.T == B``.

    Only defined for positive semidefinite ``B``; otherwise ``nu`` is ``None``
    and the inertia describes the sign pattern.
    """
    B = model.B
    vals, vecs = np.linalg.eigh(B)
    idx = np.argsort(-vals, kind="stable")
    vals, vecs = vals[idx], vecs[:, idx]
    tol = B.shape[0] * np.finfo(float).eps * max(np.max(np.abs(vals)), 0.0)
    pos, neg, zero = inertia(B, tol)
    if neg:
        return LatentPositions(None, numerical_rank(B), (pos, neg, zero))
    keep = vals > tol
    nu = vecs[:, keep] * np.sqrt(vals[keep])
    # fix column signs so that the largest-magnitude entry is positive
    flip = np.sign(nu[np.argmax(np.abs(nu), axis=0), np.arange(nu.shape[1])])
    return LatentPositions(nu * flip, int(keep.sum()), (pos, neg, zero))


def block_edge_frequencies(A, blocks, n_blocks):
    """Observed edge frequency for each (unordered) block pair; NaN if no pairs."""
    A = np.asarray(A, dtype=float)
    blocks = np.asarray(blocks, dtype=int)
    freq = np.full((n_blocks, n_blocks), np.nan)
    pairs = np.zeros((n_blocks, n_blocks))
    for a in range(1, n_blocks + 1):
        ia = np.flatnonzero(blocks == a)
        for b in range(a, n_blocks + 1):
            ib = np.flatnonzero(blocks == b)
            if a == b:
                npairs = len(ia) * (len(ia) - 1) / 2
                edges = A[np.ix_(ia, ia)].sum() / 2
            else:
                npairs = len(ia) * len(ib)
                edges = A[np.ix_(ia, ib)].sum()
            pairs[a - 1, b - 1] = pairs[b - 1, a - 1] = npairs
            if npairs:
                freq[a - 1, b - 1] = freq[b - 1, a - 1] = edges / npairs
    return freq, pairs
