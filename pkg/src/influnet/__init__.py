"""Influence targeting on social networks.

Steady-state opinions are harmonic vertex functions pinned at zealot
vertices; authorities convert free vertices to maximize their share of the
total opinion mass. The package provides the solvers, the greedy and
relaxation-based placement algorithms with their verification oracles, a
two-authority turn game, experiment drivers, and an HTTP service.
"""

from .errors import (
    ConvergenceError,
    GameError,
    GameOverError,
    GraphParseError,
    GraphValidationError,
    IllegalMoveError,
    InfluNetError,
    NotStronglyConnectedError,
    OutOfTurnError,
    SingularSystemError,
    StabilityError,
    WalkCapError,
)
from .graphs import (
    Graph,
    VertexSet,
    adjacency,
    generate,
    graph_distances,
    grid_coord,
    grid_id,
    is_automorphism,
    is_strongly_connected,
    laplacian,
    read_graph,
    write_graph,
)
from .harmonic import (
    HittingEstimate,
    OpinionField,
    ScalarOpinion,
    ZealotConfig,
    dirichlet_energy,
    influence,
    mc_hitting_probability,
    simulate_dynamics,
    solve_grouped,
    solve_harmonic,
)
from .relaxation import (
    RelaxPotential,
    RelaxedState,
    gradient,
    hessian,
    maximize,
    project_simplex,
    relaxed_select,
    solve_relaxed,
    symmetry_check,
)
from .targeting import (
    SubmodularityReport,
    TargetingProblem,
    TargetingSolution,
    brute_force,
    check_submodular,
    greedy,
    set_value,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
