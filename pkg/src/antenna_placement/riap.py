"""Randomized iterative antenna placement: alternating relaxation plus random rounding."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .array_model import (
    ZERO_THRESHOLD,
    DifferenceVectors,
    Placement,
    ProblemConfig,
    Weights,
    coherence_direct,
    coherence_factorized,
    difference_vectors,
)
from .conic import build_subproblem, solve

DEFAULT_TOL = 1e-5
DEFAULT_MAX_ROUNDS = 50
SOLVER_TOL = 1e-6


@dataclass
class AlternationTrace:
    """Per-iteration record of the relaxed objective and the weight dimensions.

    ``tx_support``/``rx_support`` count the entries still available to the
    optimizer on each side.
    """

    objectives: list = field(default_factory=list)
    tx_support: list = field(default_factory=list)
    rx_support: list = field(default_factory=list)

    def append(self, objective, tx_support, rx_support):
        self.objectives.append(float(objective))
        self.tx_support.append(int(tx_support))
        self.rx_support.append(int(rx_support))

    def __len__(self):
        return len(self.objectives)


def random_binary_weights(size: int, count: int, rng=None) -> Weights:
    """Binary vector with ``count`` ones at a uniformly random subset."""
    rng = np.random.default_rng(rng)
    values = np.zeros(size)
    values[rng.choice(size, count, replace=False)] = 1.0
    return Weights(values, sum_target=count)


def evenly_spaced_weights(size: int, count: int) -> Weights:
    """Binary vector with ``count`` ones spread evenly across the grid."""
    values = np.zeros(size)
    values[np.round(np.linspace(0, size - 1, count)).astype(int)] = 1.0
    if np.count_nonzero(values) != count:
        raise ValueError(f"cannot spread {count} ones over {size} points")
    return Weights(values, sum_target=count)


def alternate(config: ProblemConfig, init_w_t: Weights, tol: float = DEFAULT_TOL,
              max_rounds: int = DEFAULT_MAX_ROUNDS, diffs: DifferenceVectors | None = None,
              solver_tol: float = SOLVER_TOL):
    """Alternate the receive and transmit relaxations until the objective settles.

    Each round solves for ``w_r`` with ``w_t`` frozen, then for ``w_t`` with
    ``w_r`` frozen. Iteration stops once a round improves the relaxed
    coherence by less than ``tol`` (relative) or after ``max_rounds``.

    Returns:
        ``(w_t, w_r, trace)`` where the trace holds one entry per round.
    """
    diffs = difference_vectors(config) if diffs is None else diffs
    w_t = init_w_t.values
    if w_t.shape != (config.m_tilde,):
        raise ValueError(f"init_w_t must have length {config.m_tilde}")
    if abs(w_t.sum() - config.m) > 1e-8:
        raise ValueError(f"init_w_t must sum to {config.m}, got {w_t.sum()}")

    trace = AlternationTrace()
    previous = np.inf
    for _ in range(max_rounds):
        w_r = solve(build_subproblem(diffs, "rx", w_t, config.n), tolerance=solver_tol).weights
        w_t = solve(build_subproblem(diffs, "tx", w_r, config.m), tolerance=solver_tol).weights
        objective = coherence_factorized(w_t, w_r, diffs)
        trace.append(objective, np.count_nonzero(w_t > ZERO_THRESHOLD), np.count_nonzero(w_r > ZERO_THRESHOLD))
        if previous - objective < tol * previous:
            break
        previous = objective
    return Weights(w_t, sum_target=config.m), Weights(w_r, sum_target=config.n), trace


def _draw(weights: Weights, count: int, rng) -> np.ndarray:
    p = np.clip(weights.values, 0.0, None)
    if np.count_nonzero(p) < count:
        raise ValueError(f"only {np.count_nonzero(p)} positive weights, cannot draw {count} antennas")
    # numpy's weighted draw without replacement renormalizes over the remaining items
    return rng.choice(p.size, size=count, replace=False, p=p / p.sum())


def round_placement(w_t: Weights, w_r: Weights, m: int, n: int, rng=None) -> Placement:
    """Draw ``m`` transmit and ``n`` receive positions with probabilities proportional to the weights."""
    rng = np.random.default_rng(rng)
    tx = _draw(w_t, m, rng)
    rx = _draw(w_r, n, rng)
    return Placement(tuple(tx), tuple(rx))


def expurgate(w_t: Weights, w_r: Weights, m: int, n: int, draws: int, rng, config: ProblemConfig,
              return_all: bool = False):
    """Keep the lowest-coherence placement among ``draws`` random roundings.

    The draws come from one generator in sequence, so for a fixed seed a
    larger ``draws`` extends the same list of candidates.
    """
    if draws < 1:
        raise ValueError("draws must be at least 1")
    rng = np.random.default_rng(rng)
    best, best_coherence, values = None, np.inf, []
    for _ in range(draws):
        placement = round_placement(w_t, w_r, m, n, rng)
        value = coherence_direct(placement, config)
        values.append(value)
        if value < best_coherence:
            best, best_coherence = placement, value
    if return_all:
        return best, best_coherence, values
    return best, best_coherence


def riap_place(config: ProblemConfig, init_w_t: Weights, rng=None, draws: int = 1,
               tol: float = DEFAULT_TOL, max_rounds: int = DEFAULT_MAX_ROUNDS,
               diffs: DifferenceVectors | None = None):
    """Full RIAP run; returns ``(placement, coherence, trace)``."""
    w_t, w_r, trace = alternate(config, init_w_t, tol=tol, max_rounds=max_rounds, diffs=diffs)
    placement, value = expurgate(w_t, w_r, config.m, config.n, draws, rng, config)
    return placement, value, trace
