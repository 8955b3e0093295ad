"""Sparse MIMO radar antenna placement by coherence minimization."""

from .array_model import (
    DifferenceVectors,
    Placement,
    ProblemConfig,
    Weights,
    coherence_direct,
    coherence_factorized,
    coherence_of_matrix,
    correlation_profile,
    difference_vectors,
    effective_column,
    make_u_grid,
    measurement_matrix,
    steering_vector,
)
from .conic import ConeProblem, InfeasibleProblemError, SolveReport, build_subproblem, oracle_solve, solve
from .diap import diap_place, diap_trace, eliminate_smallest
from .riap import alternate, expurgate, random_binary_weights, riap_place, round_placement

__all__ = [
    "ConeProblem",
    "DifferenceVectors",
    "InfeasibleProblemError",
    "Placement",
    "ProblemConfig",
    "SolveReport",
    "Weights",
    "alternate",
    "build_subproblem",
    "coherence_direct",
    "coherence_factorized",
    "coherence_of_matrix",
    "correlation_profile",
    "diap_place",
    "diap_trace",
    "difference_vectors",
    "effective_column",
    "eliminate_smallest",
    "expurgate",
    "make_u_grid",
    "measurement_matrix",
    "oracle_solve",
    "random_binary_weights",
    "riap_place",
    "round_placement",
    "solve",
    "steering_vector",
]
