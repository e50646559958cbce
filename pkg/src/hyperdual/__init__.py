"""Loop-contour hypergeometric integrals and their dimension duality.

Numerical engine for a family of multi-loop contour integrals with
multivalued integrands, together with desk-scale verification of the
identities they satisfy: the equality between the l2-dimensional and the
m2-dimensional evaluations, the first-order matrix equation in z, Selberg
closed forms, large-z asymptotics, compatibility and parameter-swap
duality of the Knizhnik-Zamolodchikov and dynamical operators, the
solution property of the integral matrix, and steepest-descent
asymptotics of the one-dimensional reductions.
"""

from .asympt import SaddleParams, dimension_scan, steepest_asympt, steepest_numeric
from .contour import (
    ContourGeometry,
    LoopPath,
    MultiLoopContour,
    SteepestLoop,
    assign_base_args,
    build_multi_loop,
    build_steepest_loop,
)
from .errors import (
    BalanceViolation,
    ConfigError,
    DegenerateParameters,
    FactorVanishes,
    GammaPole,
    GeometryError,
    HyperdualError,
    IndexOutOfRange,
    NegativeDimension,
    NoConvergence,
    NonGenericKappa,
    SingularPath,
    SinZero,
    StepTooLarge,
)
from .glrep import (
    ModuleSpec,
    OperatorMatrix,
    WeightBasis,
    act_E,
    casimir_matrix,
    compatibility_check,
    duality_intertwine_check,
    dyn_operator,
    kz_operator,
    solution_residual_check,
)
from .hyperint import (
    IntegralMatrix,
    constant_Cb,
    corollary_ratio,
    duality_gap,
    integral_I,
    integral_K,
    matrix_Ihat,
)
from .integrand import (
    BranchState,
    LogIntegrandValue,
    branch_track_step,
    master_phi4,
    master_phi_l,
    weight_w,
    weight_w4,
)
from .model import (
    AdmissibleIndex,
    CheckReport,
    CheckValue,
    WeightData,
    admissible_range,
    validate_weight_data,
)
from .ode import (
    CoefficientMatrices,
    asympt_leading,
    build_U_from_psi,
    coefficient_matrices,
    ihat_column,
    ode_residual,
    solve_psi,
    u_b_solution,
    u_psi_solution,
)
from .quadrature import (
    QuadratureConfig,
    QuadratureResult,
    integrate_multiloop,
    quick_config,
)
from .selberg import SelbergParams, selberg_closed, selberg_numeric

__version__ = "0.1.0"
