"""Semi-supervised clustering by jointly learning a self-representation
affinity and a low-dimensional embedding under pairwise constraints."""

from .constraints import (
    ConstraintSet,
    encode_constraints,
    gen_constraints_incomplete,
    gen_constraints_setting1,
    gen_constraints_setting2,
)
from .evaluation import EvalReport, accuracy, evaluate_embedding, kmeans, nmi, normalize_columns
from .graph import fuse_affinity, knn_affinity, laplacian, normalized_laplacian
from .hypergraph import Hypergraph, hybrid_affinity, hypergraph_O, incidence
from .linalg import EigPair, spd_solve, sym_eig_topk
from .selfrep import build_theta, selfrep_affinity, update_A, update_Z
from .solver import FitResult, SolverConfig, compute_alpha1, eval_objective, fit, spectral_embedding
from .synthetic import make_blobs
from .traceratio import TraceRatioResult, solve_H, trace_ratio_solve

__version__ = "0.1.0"
