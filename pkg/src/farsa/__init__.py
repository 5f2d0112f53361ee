"""Reduced-space active-set solver for l1-regularized convex minimization.

The solver alternates between Newton-CG steps on the predicted support and
scaled freeing steps on the zero variables, with termination driven by the
pair of optimality measures (beta on the zeros, phi on the support).  A
proximal-gradient baseline, a logistic-regression oracle, and LIBSVM data
ingestion round out the package.
"""

from .datasets import (
    Dataset,
    DatasetFormatError,
    load_dataset,
    parse_libsvm,
    relabel_binary_mnist,
    scale_max_abs,
    scale_minus1_1,
    scale_pixels,
    write_libsvm,
)
from .ista import IstaConfig, ista_solve, shrink
from .linalg import SparseMatrix, gather, scatter, spmv, spmv_transpose
from .linesearch import (
    BetaSearchResult,
    LineSearchError,
    PhiOutcome,
    PhiSearchResult,
    linesearch_beta,
    linesearch_phi,
    project_orthant,
)
from .objectives import LogisticObjective, ObjectiveOracle, QuadraticObjective
from .optimality import (
    IndexPartition,
    OptimalityPair,
    compute_beta,
    compute_phi,
    is_optimal,
    ista_step,
    optimality_measures,
    partition_indices,
)
from .solver import (
    IterationRecord,
    IterationType,
    SolveReport,
    SolveStatus,
    SolverConfig,
    SolverState,
    solve,
)
from .subproblem import (
    CgLimits,
    CgOutcome,
    CgStopReason,
    ModelEval,
    accept_direction,
    cg_solve,
    model_decrease,
    reference_direction,
)

__version__ = "0.1.0"

__all__ = [
    "BetaSearchResult",
    "CgLimits",
    "CgOutcome",
    "CgStopReason",
    "Dataset",
    "DatasetFormatError",
    "IndexPartition",
    "IstaConfig",
    "IterationRecord",
    "IterationType",
    "LineSearchError",
    "LogisticObjective",
    "ModelEval",
    "ObjectiveOracle",
    "OptimalityPair",
    "PhiOutcome",
    "PhiSearchResult",
    "QuadraticObjective",
    "SolveReport",
    "SolveStatus",
    "SolverConfig",
    "SolverState",
    "SparseMatrix",
    "accept_direction",
    "cg_solve",
    "compute_beta",
    "compute_phi",
    "gather",
    "is_optimal",
    "ista_solve",
    "ista_step",
    "linesearch_beta",
    "linesearch_phi",
    "load_dataset",
    "model_decrease",
    "optimality_measures",
    "parse_libsvm",
    "partition_indices",
    "project_orthant",
    "reference_direction",
    "relabel_binary_mnist",
    "scale_max_abs",
    "scale_minus1_1",
    "scale_pixels",
    "scatter",
    "shrink",
    "solve",
    "spmv",
    "spmv_transpose",
    "write_libsvm",
]
