"""Mass minimization of a parameterized planar truss by constrained
Bayesian optimization, with a built-in direct-stiffness solver."""

from .acquisition import (
    AcquisitionConfig,
    AcquisitionKind,
    expected_improvement,
    feasibility_probability,
    lower_confidence_bound,
    maximize_acquisition,
    probability_of_improvement,
)
from .bo import (
    BestResult,
    BOConfig,
    NoFeasibleDesignError,
    OptimizationTrace,
    Phase,
    TraceRecord,
    latin_hypercube,
    random_search,
    run,
)
from .config import ConfigError, load_config, parse_config, render_config
from .fea import (
    FailureMode,
    FEAResult,
    SingularSystemError,
    StiffnessSystem,
    analyze,
    assemble,
    element_stiffness,
    member_forces,
    method_of_joints,
    solve_displacements,
    support_reactions,
)
from .gp import (
    Dataset,
    GPHyperparams,
    GPModel,
    NumericalError,
    build_model,
    fit,
    kernel_eval,
    kernel_matrix,
    log_marginal_likelihood,
    predict,
    predict_batch,
)
from .truss import (
    AL_6061_T6,
    DEFAULT_SECTION,
    DEFAULT_TOTAL_LOAD_N,
    PARAM_BOUNDS,
    SPAN_MM,
    BoundsError,
    DegenerateGeometryError,
    DerivedDesign,
    DesignParams,
    Material,
    Section,
    TrussGeometry,
    build_geometry,
    build_load_case,
    derive_design,
    mass,
    params_from_unit,
    unit_from_params,
)

__version__ = "0.1.0"
