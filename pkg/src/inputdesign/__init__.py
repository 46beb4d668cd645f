"""Optimal input design for regularized FIR identification.

The design step returns an optimal input autocovariance ``r*``; the inverse
embeddings turn ``r*`` into concrete periodic inputs whose cyclic
autocovariance equals it.
"""

from .design import (
    DesignProblem,
    DesignSolution,
    KernelSpec,
    SolverOptions,
    objective_gradient,
    objective_value,
    realize_kernel,
    solve_design,
)
from .embeddings import (
    Embedding,
    build_fde,
    build_gie,
    build_lambda,
    build_real_embedding,
    build_tde,
    enumerate_real_embeddings,
)
from .errors import (
    BadDimension,
    BadHyperparameter,
    Infeasible,
    InputDesignError,
    NotConverged,
    NotPSD,
    SymmetryViolation,
)
from .identify import FirSystem, evaluate_design, ls_estimate, regressor, rls_estimate, simulate
from .inversion import (
    PhaseAssignment,
    cross_map_fde_to_tde,
    cross_map_tde_to_fde,
    fdie,
    giie,
    membership_check,
    random_phases,
    solve_spectrum,
    tdie,
)
from .spectral import dft, idft, quadratic_map, toeplitz_from_autocov

__version__ = "0.1.0"
