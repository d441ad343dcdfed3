"""Graph clustering from random-walk node embeddings.

Generates planted-partition graphs, builds walk corpora under simple,
non-backtracking, or begrudgingly backtracking step rules, trains
skip-gram embeddings with negative sampling, clusters them with k-means,
and scores the result with CCR and NMI. A spectral module constructs the
vertex and directed-edge transition matrices of the three walks and
compares their mixing rates.
"""

from .cluster import KmeansParams, KmeansResult, cluster_embedding, kmeans
from .embed import EmbeddingMatrix, SgnsParams, pair_gradients, \
    pair_objective, read_embedding, sigmoid, train_sgns, write_embedding
from .graph import Graph, SbmParams, connected_components, degree, \
    generate_sbm, random_regular, read_edge_list, read_labels, volume, \
    write_edge_list, write_labels
from .metrics import MetricsReport, ccr, confusion_matrix, nmi, score
from .pipeline import ArmConfig, ExperimentConfig, PipelineResult, \
    ResultRow, run_cell, run_pipeline, run_sweep
from .plots import emit_plot
from .spectral import EdgeTransitionMatrix, LaplacianSet, MixingDecay, \
    MixingReport, VertexTransitionMatrix, adjacency_matrix, \
    analytic_mixing_rates, build_edge_transition, build_laplacians, \
    build_vertex_transition, check_doubly_stochastic, check_ergodicity, \
    directed_edge_endpoints, directed_edge_ids, measure_mixing_empirical, \
    mixing_rates, second_eigenvalue, stationary_distribution
from .walks import CooccurrenceMatrix, WalkCorpus, WalkParams, WalkPolicy, \
    build_cooccurrence, build_corpus, generate_walk, read_corpus, \
    step_begrudging, step_nonbacktracking, step_simple, write_corpus

__version__ = "0.1.0"
