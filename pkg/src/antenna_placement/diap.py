"""Deterministic iterative antenna placement.

The relaxed transmit and receive problems are solved alternately, as in the
randomized scheme, but after every solve the grid points carrying the least
weight are removed for good. The elimination rate ``p`` bounds how much
probability mass a single pass may discard: indices are removed, smallest
weight first, while the surviving mass exceeds ``target - p``. The loop
ends once exactly ``M`` transmit and ``N`` receive grid points remain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .array_model import DifferenceVectors, Placement, ProblemConfig, Weights, coherence_factorized, difference_vectors
from .conic import build_subproblem, solve
from .riap import SOLVER_TOL, AlternationTrace


@dataclass
class DiapState:
    w_t: Weights
    w_r: Weights
    p: float
    iteration: int = 0

    @property
    def eliminated_tx(self) -> frozenset:
        return self.w_t.eliminated

    @property
    def eliminated_rx(self) -> frozenset:
        return self.w_r.eliminated


def eliminate_smallest(weights: Weights, p: float, count_target: int | None = None) -> Weights:
    """Remove surviving grid points, smallest weight first, while both guards hold.

    The guards are ``sum(w) > target - p`` and ``#surviving > target``. Each
    removed index joins ``weights.eliminated`` and its value is set to zero.
    Among equal minima the lowest index goes first.

    Example:
        >>> w = eliminate_smallest(Weights([0.5, 0.5, 0.5, 0.5], sum_target=2), p=0.4)
        >>> sorted(w.eliminated)
        [0]
    """
    target = weights.sum_target if count_target is None else count_target
    values = weights.values.copy()
    eliminated = set(weights.eliminated)
    alive = np.ones(values.size, dtype=bool)
    alive[list(eliminated)] = False
    # ascending by value, ties by index
    order = [j for j in np.lexsort((np.arange(values.size), values)) if alive[j]]
    for j in order:
        if not (values[alive].sum() > target - p and alive.sum() > target):
            break
        values[j] = 0.0
        alive[j] = False
        eliminated.add(int(j))
    return Weights(values, frozenset(eliminated), weights.sum_target)


def _check_init(config, init_w_t):
    values = init_w_t.values
    if values.shape != (config.m_tilde,):
        raise ValueError(f"init_w_t must have length {config.m_tilde}")
    if abs(values.sum() - config.m) > 1e-8:
        raise ValueError(f"init_w_t must sum to {config.m}, got {values.sum()}")


def diap_place(config: ProblemConfig, p: float, init_w_t: Weights, tol: float = SOLVER_TOL,
               diffs: DifferenceVectors | None = None, max_iterations: int | None = None):
    """Run the deterministic placement loop.

    Parameters
    ----------
    config : ProblemConfig
        Grid sizes and antenna counts.
    p : float
        Elimination rate, ``p > 0``. Larger values discard more weight per
        pass and finish in fewer iterations.
    init_w_t : Weights
        Starting transmit weights summing to ``M``.
    tol : float
        Relative tolerance of every subproblem solve.

    Returns
    -------
    placement : Placement
        The ``M`` and ``N`` grid points that survive elimination.
    trace : AlternationTrace
        Entry ``k`` holds the surviving grid sizes at the start of outer
        iteration ``k`` (the last entry is the final ``(M, N)``) and the
        relaxed coherence reached in that iteration.
    """
    if not p > 0:
        raise ValueError(f"elimination rate p must be positive, got {p}")
    _check_init(config, init_w_t)
    diffs = difference_vectors(config) if diffs is None else diffs
    if max_iterations is None:
        max_iterations = max(config.m_tilde - config.m, config.n_tilde - config.n) + 1

    state = DiapState(
        w_t=Weights(init_w_t.values, frozenset(), config.m),
        w_r=Weights(np.zeros(config.n_tilde), frozenset(), config.n),
        p=p,
    )
    trace = AlternationTrace()

    def unfinished():
        return (config.m_tilde - len(state.eliminated_tx) > config.m
                or config.n_tilde - len(state.eliminated_rx) > config.n)

    while unfinished():
        if state.iteration >= max_iterations:
            raise RuntimeError(f"elimination did not finish within {max_iterations} iterations")
        tx_alive = config.m_tilde - len(state.eliminated_tx)
        rx_alive = config.n_tilde - len(state.eliminated_rx)

        report = solve(build_subproblem(diffs, "rx", state.w_t.values, config.n, state.eliminated_rx), tolerance=tol)
        w_r = eliminate_smallest(Weights(report.weights, state.eliminated_rx, config.n), p)

        report = solve(build_subproblem(diffs, "tx", w_r.values, config.m, state.eliminated_tx), tolerance=tol)
        objective = coherence_factorized(report.weights, w_r.values, diffs)
        w_t = eliminate_smallest(Weights(report.weights, state.eliminated_tx, config.m), p)

        trace.append(objective, tx_alive, rx_alive)
        state = DiapState(w_t, w_r, p, state.iteration + 1)

    tx = sorted(set(range(config.m_tilde)) - state.eliminated_tx)
    rx = sorted(set(range(config.n_tilde)) - state.eliminated_rx)
    placement = Placement(tuple(tx), tuple(rx))
    w_t_final, w_r_final = placement.weights(config)
    trace.append(coherence_factorized(w_t_final, w_r_final, diffs), len(tx), len(rx))
    return placement, trace


def diap_trace(config: ProblemConfig, p: float, init_w_t: Weights, tol: float = SOLVER_TOL,
               diffs: DifferenceVectors | None = None) -> AlternationTrace:
    """Surviving grid sizes per outer iteration of :func:`diap_place`."""
    return diap_place(config, p, init_w_t, tol=tol, diffs=diffs)[1]
