"""Pattern-constrained Hamilton cycles in ordered graph collections."""

from .core import (
    ColourPattern,
    ColouredWalk,
    Graph,
    GraphCollection,
    SolverParams,
    VerifyResult,
    min_collection_degree,
    reduce_pattern_to_identity,
    verify_coloured_walk,
    verify_pattern_cycle,
)
from .instances import (
    gen_counterexample,
    gen_identical,
    gen_random_dirac,
    load_instance,
    make_pattern,
    save_instance,
)
from .oracle import OracleResult, count_solutions, exact_solve
from .pipeline import SolveResult, solve

__version__ = "0.1.0"

__all__ = [
    "ColourPattern",
    "ColouredWalk",
    "Graph",
    "GraphCollection",
    "OracleResult",
    "SolveResult",
    "SolverParams",
    "VerifyResult",
    "count_solutions",
    "exact_solve",
    "gen_counterexample",
    "gen_identical",
    "gen_random_dirac",
    "load_instance",
    "make_pattern",
    "min_collection_degree",
    "reduce_pattern_to_identity",
    "save_instance",
    "solve",
    "verify_coloured_walk",
    "verify_pattern_cycle",
]
