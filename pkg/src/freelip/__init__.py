"""Computing in Lipschitz-free spaces over finite pointed metric spaces.

Transportation-cost norms with certified duality, linearized Lipschitz
operators with injectivity and support diagnostics, and exact generators
for the classical counterexample families.
"""

from .errors import FreeLipError
from .functions import (
    IntervalFamily,
    LipFunction,
    ModulusFunction,
    Weight,
    inf_convolve,
    lip_constant,
    mcshane_extend,
    plateau,
    psi_n,
    separation_family,
    weighting_operator,
)
from .molecule import Molecule, canonicalize, delta, elementary, pair, support
from .norms import StepFunction, TransportPlan, norm, norm_dual_lp, norm_flow, norm_line
from .operators import (
    BiLipConstants,
    LinearOperator,
    ModulusBracket,
    PointMap,
    bilip_constants,
    check_nonreturning,
    check_support_preservation,
    compose_Cf,
    composition_support_laws,
    embedding_modulus,
    linearize,
    lipschitz_ball_vertices,
)
from .space import (
    FiniteMetricSpace,
    check_cover_condition,
    distance_set_measure,
    infer_line_positions,
    line_space,
    product_space,
    random_space,
    snowflake,
    truncate_metric,
    validate_space,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
