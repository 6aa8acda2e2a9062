"""Ground states of coupled nonlinear elliptic systems on finite weighted graphs.

The package computes least-energy solutions of a two-component coupled system
and of its Dirichlet limit on the potential wells, by projected descent on the
Nehari manifold, and reproduces the concentration behavior of the solutions as
the potential scaling grows.
"""

from .calculus import (
    PairFunction,
    check_admissible,
    dirichlet_energy_sq,
    grad_length,
    gradient_form,
    gradient_form_all,
    inner_H_lambda,
    integrate,
    laplacian,
    laplacian_all,
    norm_H_lambda_sq,
    norm_H_Omega_sq,
    norm_H_sq,
    norm_Lq,
)
from .errors import (
    AllRestartsDegenerateError,
    BoundaryMismatchError,
    DegeneratePairError,
    DomainViolationError,
    GraphValidationError,
    GraphwellError,
    ParseError,
    UnknownLabelError,
)
from .experiments import (
    G22_EDGES,
    G22_MIRROR,
    TABLE1_REFERENCE,
    ComparisonReport,
    ReferenceDiff,
    SweepConfig,
    SweepRecord,
    aligned_h_distance,
    build_g22,
    compare_reference,
    decade_grid,
    g22_reference_values,
    lambda_sweep,
)
from .functional import (
    DirichletProblem,
    LambdaFamily,
    LambdaProblem,
    NehariDiagnostics,
    Problem,
    coupling_integral,
    energy_J_lambda,
    energy_J_Omega,
    energy_of,
    grad_J_lambda,
    grad_J_Omega,
    nehari_diagnostics,
    nehari_project,
    nehari_scale,
    norm_sq_of,
    residual_of,
    signed_power,
)
from .graph import (
    PotentialField,
    ValidationReport,
    WeightedGraph,
    as_domain,
    boundary,
    closure,
    graph_distance,
    validate_graph,
)
from .problem_io import (
    ProblemFile,
    format_problem,
    parse_problem,
    parse_problem_file,
    read_solution,
    write_solution,
    write_sweep,
)
from .solver import (
    SolveResult,
    SolverConfig,
    descent_step,
    solve_dirichlet,
    solve_ground_state,
)

__version__ = "0.1.0"
