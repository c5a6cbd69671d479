"""Quotient-based eigenvalue tools: Hermitian pencils, folded iteration,
homogeneous nonlinear eigenproblems and the matrix p-Laplacian."""
from .errors import (DegenerateError, DimensionError, EvaluationError, IndefiniteError,
                     InconsistencyError, NonHomogeneousError, PreconditionError, QuotientError,
                     RankDeficiencyError, SingularMatrixError, SingularPencilError,
                     UndefinedPhaseError, UnsupportedExponentError)
from .folded import FoldedResult, SubspaceState, folded_iterate, folded_objective
from .homogeneous import (HomogeneousProblem, cauchy_schwarz_quotient, check_homogeneity,
                          cs_ascent, cs_stationarity_check_standard, euler_potentials,
                          homogenize, is_gradient_problem, make_gross_pitaevskii,
                          make_linear_pencil_problem, make_linear_system_problem, make_rlinear,
                          nonlinear_optimal_quotient, refine_eigenpair, spectral_emptiness_bound,
                          trial_quotient, wirtinger_gradient)
from .oracle import dense_generalized_eig, plap_2x2_solve, svd_oracle
from .pencil import (HermitianPencil, eigenvalue_distance_bound, fem_saddle_inner_product,
                     fem_saddle_pencil, fold, is_hermitian_pencil, linearize_quadratic,
                     optimal_quotient, pencil_sqrt, rayleigh_quotient)
from .plaplacian import (PLaplacianProblem, deflated_extremum, deflation_basis, dual_vector,
                         generalized_gradient_apply, p_extreme, p_gradient, p_quotient)
from .trace import ConvergenceTrace, TraceRecord

__version__ = "0.1.0"
