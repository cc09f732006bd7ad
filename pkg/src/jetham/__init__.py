"""Symbolic-numeric engine for the time-dependent Hamilton geometry of
momenta: metrics and Christoffel symbols, d-tensor fields, semisprays,
nonlinear connections, and adapted frames on the phase space (t, x, p),
with numeric verification of every transformation law at sampled points.
"""

from .charts import (
    CoordChange,
    TransitionData,
    compose_changes,
    identity_change,
    induced_point,
    scalar_to_new_chart,
    transition,
    verify_frame_rules,
)
from .dtensor import (
    DTensor,
    Hamiltonian,
    IndexKind,
    h_normalization,
    liouville,
    metric_hamiltonian,
    momentum_liouville,
    push_forward,
    verify_dtensor,
    vertical_metrical,
)
from .errors import (
    ChartInverseError,
    DimensionError,
    DomainError,
    ExprSyntaxError,
    JethamError,
    MissingSubstitutionError,
    PreconditionError,
    ProblemFormatError,
    RegularityError,
    SignatureMismatchError,
)
from .expr import (
    Expr,
    Point,
    Var,
    compose,
    const,
    diff,
    evaluate,
    parse,
    pvar,
    tvar,
    xvar,
)
from .frames import (
    AdaptedCoframe,
    AdaptedFrame,
    adapted_coframe,
    adapted_frame,
    decompose,
    pairing,
    reconstruct,
    verify_adapted_tensoriality,
)
from .metrics import (
    ChristoffelSpace,
    ChristoffelTime,
    SpaceMetric,
    TimeMetric,
    christoffel_space,
    christoffel_time,
    compatibility_residual,
    inverse_space,
    inverse_time,
    transform_space_metric,
    transform_time_metric,
)
from .nlconn import (
    NonlinearConnection,
    canonical_connection,
    connection_from_spray,
    spray_from_connection,
    verify_connection_law,
)
from .problem import Problem, load_problem, problem_from_dict
from .report import CheckRecord, Report, report_to_json, residual
from .sampling import Box, sample_points
from .spray import (
    MomentumSemispray,
    SpatialSemispray,
    TemporalSemispray,
    canonical_spatial,
    canonical_temporal,
    verify_spatial_law,
    verify_temporal_law,
)

__version__ = "0.1.0"
