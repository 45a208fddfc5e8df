import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.stats import norm

from vsparse.sbm import occlude_graph, sample
from vsparse.spectral import (
    ase, eig_sym, inertia, numerical_rank, procrustes, profile_likelihood_elbow,
    profile_loglik, scree, select_dimension,
)

from conftest import random_adjacency


def brute_force_elbow(x):
    """Split maximising the two-group normal likelihood with pooled variance."""
    p = len(x)
    best, arg = -np.inf, None
    for q in range(1, p):
        a, b = x[:q], x[q:]
        ss = ((a - a.mean()) ** 2).sum() + ((b - b.mean()) ** 2).sum()
        sd = np.sqrt(max(ss / max(p - 2, 1), 1e-12))
        ll = norm.logpdf(a, a.mean(), sd).sum() + norm.logpdf(b, b.mean(), sd).sum()
        if ll > best + 1e-12:
            best, arg = ll, q
    return arg


sorted_seqs = st.lists(st.floats(0, 100, allow_nan=False), min_size=3, max_size=25).map(
    lambda v: np.sort(np.array(v))[::-1])


@given(sorted_seqs)
def test_elbow_matches_brute_force(x):
    ll = profile_loglik(x)
    ref = brute_force_elbow(x)
    got = profile_likelihood_elbow(x)
    # equal within rounding when two splits tie
    assert got == ref or abs(ll[got - 1] - ll[ref - 1]) < 1e-8 * max(1, abs(ll[ref - 1]))


@given(sorted_seqs, st.floats(0.01, 1000), st.floats(-50, 50))
def test_elbow_invariant_to_affine_rescaling(x, a, b):
    if np.ptp(x) < 1e-3:
        return
    ll = profile_loglik(x)
    top = np.sort(ll)[::-1]
    if len(top) > 1 and top[0] - top[1] < 1e-6:
        return  # near-tie: the argmax may flip under rounding
    assert profile_likelihood_elbow(a * x + b) == profile_likelihood_elbow(x)


def test_elbow_known_sequences():
    assert profile_likelihood_elbow([10, 9.5, 9.8, 1, 1.1, 0.9]) == 3
    assert profile_likelihood_elbow([50, 10, 9, 1, 1, 1, 1], which_elbow=2) == 3
    assert profile_likelihood_elbow([5, 5, 5]) == 1
    # second search with a single value left returns the sequence length
    assert profile_likelihood_elbow([1, 1, 0], which_elbow=2) == 3


def test_elbow_argument_errors():
    with pytest.raises(ValueError):
        profile_likelihood_elbow([1, 2])
    with pytest.raises(ValueError):
        profile_likelihood_elbow([3, 2, 1], which_elbow=3)


sym = st.integers(1, 12).flatmap(lambda n: arrays(
    np.float64, (n, n), elements=st.floats(-10, 10, allow_nan=False))).map(lambda M: M + M.T)


@given(sym, st.sampled_from(["magnitude", "algebraic"]))
def test_eig_sym_reconstructs_and_orders(M, ordering):
    e = eig_sym(M, ordering)
    scale = max(1.0, np.abs(M).max())
    assert np.abs(e.reconstruct() - M).max() <= 1e-10 * scale
    np.testing.assert_allclose(e.vectors.T @ e.vectors, np.eye(len(M)), atol=1e-10)
    key = np.abs(e.values) if ordering == "magnitude" else e.values
    assert np.all(np.diff(key) <= 1e-12 * scale)


def test_eig_sym_rejects_asymmetric_and_bad_ordering():
    with pytest.raises(ValueError, match="symmetric"):
        eig_sym(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        eig_sym(np.eye(2), ordering="size")


def test_magnitude_order_breaks_ties_by_position():
    e = eig_sym(np.diag([-2.0, 2.0, 1.0]), "magnitude")
    # eigh returns ascending values, so -2 comes before 2
    np.testing.assert_array_equal(e.values, [-2.0, 2.0, 1.0])


def test_rank_and_inertia():
    M = np.diag([3.0, -1.0, 0.0, 1e-20])
    assert numerical_rank(M) == 2
    assert inertia(M) == (1, 1, 2)
    assert numerical_rank(np.zeros((3, 3))) == 0


def test_ase_reproduces_rank_two_matrix():
    X = np.random.default_rng(0).random((30, 2))
    P = X @ X.T
    emb = ase(P, 2, "algebraic")
    np.testing.assert_allclose(emb.Z @ emb.Z.T, P, atol=1e-10)
    R = procrustes(emb.Z, X)
    np.testing.assert_allclose(emb.Z @ R, X, atol=1e-8)


def test_ase_magnitude_keeps_negative_eigenvalues():
    A = np.array([[0, 1], [1, 0]], dtype=float)
    emb = ase(A, 2)
    assert emb.signs.tolist() == [-1, 1]
    np.testing.assert_allclose((emb.Z * emb.signs) @ emb.Z.T, A, atol=1e-12)
    with pytest.raises(ValueError):
        ase(A, 3)
    assert emb.truncate(1).d_hat == 1


def test_ase_reuses_given_decomposition():
    A = random_adjacency(np.random.default_rng(1), 20)
    eig = eig_sym(A, "magnitude")
    np.testing.assert_array_equal(ase(A, 3, decomposition=eig).Z, ase(A, 3).Z)


def test_scree_top_m_and_signs():
    A = random_adjacency(np.random.default_rng(2), 25)
    sc = scree(A, top_m=5)
    assert len(sc.values) == 5
    np.testing.assert_allclose(sc.magnitudes, np.sort(np.abs(np.linalg.eigvalsh(A)))[::-1][:5])
    assert set(sc.signs) <= {-1, 0, 1}
    with pytest.raises(ValueError):
        scree(A, top_m=0)


def test_occlusion_spectrum_has_two_dominant_eigenvalues(model):
    g = occlude_graph(sample(model, 200, seed=3), 0.74, seed=4)
    sc = scree(g.adjacency, top_m=22)
    assert select_dimension(g.adjacency, top_m=22) == 2
    assert sc.values[0] > 0


def test_select_dimension_signed_mode():
    # two large positive eigenvalues, one large negative one
    Q = np.linalg.qr(np.random.default_rng(4).normal(size=(12, 12)))[0]
    vals = np.array([40.0, 38.0, -39.0] + [0.5, -0.4, 0.3, -0.2, 0.1, 0.0, 0.2, -0.1, 0.05])
    M = (Q * vals) @ Q.T
    assert select_dimension(M) == 3
    assert select_dimension(M, ordering="algebraic") == 2
