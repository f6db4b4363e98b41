"""Solution pairs for fourth-order retarded equations with functional boundary conditions."""

from .funcspace import GridFunction, c2_norm, cone_check, state_view
from .kernels import BcKind, KernelSet, kernel_row_integral, make_kernel_set
from .operator import HammersteinOperator, apply, operator_norm_lower_bound
from .oracle import VerificationReport, reintegrate, verify
from .presets import make_preset
from .problem import (
    BoundaryFunctional,
    DelayRHS,
    GenericRHS,
    HistoryDatum,
    ProblemSpec,
    build_psihat,
    eval_boundary_functional,
    eval_rhs,
)
from .quadrature import QuadratureSpec
from .solver import (
    DegenerateOperator,
    NonConvergence,
    SolutionPair,
    SolverOptions,
    check_feasibility,
    feasibility_value,
    solve_at_rho,
    sweep_rho,
)

__version__ = "0.1.0"
