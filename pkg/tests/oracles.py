"""Slow, loop-based reference computations used as test oracles."""

import itertools

import numpy as np


def u_value(g, G):
    return -1.0 + 2.0 * g / G


def column(tx, rx, g, G):
    """Active virtual-array column for 1-based grid index ``g`` built element by element."""
    u = u_value(g, G)
    out = []
    for j in rx:
        for i in tx:
            out.append(np.exp(2j * np.pi * u * (0.5 * j)) * np.exp(2j * np.pi * u * (0.5 * i)))
    return np.array(out)


def pairwise_coherence(tx, rx, G):
    cols = [column(tx, rx, g, G) for g in range(1, G + 1)]
    best = 0.0
    for a in range(G):
        for b in range(G):
            if a == b:
                continue
            num = abs(np.vdot(cols[a], cols[b]))
            den = np.linalg.norm(cols[a]) * np.linalg.norm(cols[b])
            best = max(best, num / den)
    return best


def brute_force_optimum(m_tilde, n_tilde, m, n, G):
    best = np.inf
    for tx in itertools.combinations(range(m_tilde), m):
        for rx in itertools.combinations(range(n_tilde), n):
            best = min(best, pairwise_coherence(tx, rx, G))
    return best


def successive_sampling_law(weights, count):
    """Exact probability of each unordered subset under sequential weighted draws."""
    weights = np.asarray(weights, dtype=float)
    law = {}
    for seq in itertools.permutations(np.flatnonzero(weights > 0), count):
        prob, remaining = 1.0, weights.sum()
        for k in seq:
            prob *= weights[k] / remaining
            remaining -= weights[k]
        key = tuple(sorted(int(k) for k in seq))
        law[key] = law.get(key, 0.0) + prob
    return law
