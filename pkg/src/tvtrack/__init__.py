"""Track time-varying optima of costs whose hidden parameters follow unknown
linear dynamics, identified in exact coordinates from finitely many gradient
measurements."""

from .costs import (
    CostModel,
    get_model,
    make_example1_model,
    make_nonpoly_model,
    make_polynomial_model,
    make_quadratic_model,
)
from .exceptions import (
    CertificateUnavailableError,
    ConfigError,
    DivergenceError,
    IdentificationError,
    NoMinimizerError,
    NotIdentifiableError,
    PipelineError,
    ReferenceUnavailableError,
    SingularTransformError,
    SolverError,
    UnderdeterminedTransformError,
)
from .oracle import (
    AssumptionReport,
    Dataset,
    ParameterSystem,
    ProbeSchedule,
    check_assumptions,
    collect_dataset,
    parameter_at,
    parameter_trajectory,
    query_gradient,
)
from .pipeline import (
    ExperimentReport,
    ScenarioConfig,
    builtin_config,
    emit_report,
    load_config,
    run_scenario,
)
from .recovery import (
    IdentificationResult,
    WCertificate,
    build_M,
    check_necessary,
    check_sufficient_W,
    identify_from_dataset,
    predict_parameter_trajectory,
    predict_parameters,
    propagate_zbar,
    solve_transform,
)
from .solvers import (
    TvgdConfig,
    quadratic_argmin,
    reference_optimum,
    static_gd_step,
    tv_gradient_descent,
)
from .subspace import (
    HankelFactorization,
    SimilarRealization,
    build_hankel,
    default_depth,
    factorize,
    initial_states,
    realize,
    shift_estimate,
)

__version__ = "0.1.0"
