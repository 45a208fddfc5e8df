"""Robust vertex classification on stochastic blockmodel graphs.

Sparse representation classification (SRC) of adjacency columns by orthogonal
matching pursuit, compared against kNN and LDA on the adjacency spectral
embedding, with occlusion and linkage-reversion contamination models.
"""
from .classifiers import knn_classify, knn_fit, lda_classify, lda_fit, src_classify
from .evaluation import chance_error, loo_ase, loo_src, monte_carlo, sweep
from .graph import LabeledGraph, density, diagonal_augment, preprocess, validate
from .omp import build_dictionary, omp, omp_nonnegative
from .sbm import (
    BlockModel,
    asymptotic_correlations,
    check_src_condition,
    moments,
    occlude_graph,
    occlude_model,
    reverse_graph,
    reverse_model,
    sample,
    sim_params,
)
from .spectral import ase, eig_sym, profile_likelihood_elbow, scree

__version__ = "0.1.0"
