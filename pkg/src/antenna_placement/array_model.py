"""Angular grid, steering vectors and coherence of the sparse MIMO virtual array.

All positions are measured in wavelengths, so a half-wavelength grid has
step 0.5 and a steering phase is simply ``2*pi*u*y``. Grid points and
antenna indices are 0-based; the angular anchor ``anchor_index`` keeps the
1-based convention ``g in [1, G]`` used for the DoA grid
``u_g = -1 + 2g/G``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ZERO_THRESHOLD = 1e-6


@dataclass(frozen=True)
class ProblemConfig:
    """Sizes of the placement problem.

    Attributes:
        m_tilde: Number of transmit grid points.
        n_tilde: Number of receive grid points.
        m: Number of transmit antennas to place.
        n: Number of receive antennas to place.
        g_count: Number of angular grid points ``G``.
        anchor_index: Reference grid point ``g'`` in ``[1, G]``. Defaults to
            ``G``.
    """

    m_tilde: int
    n_tilde: int
    m: int
    n: int
    g_count: int
    anchor_index: int | None = None

    def __post_init__(self):
        if self.anchor_index is None:
            object.__setattr__(self, "anchor_index", self.g_count)
        if not 1 <= self.m <= self.m_tilde:
            raise ValueError(f"need 1 <= m <= m_tilde, got m={self.m}, m_tilde={self.m_tilde}")
        if not 1 <= self.n <= self.n_tilde:
            raise ValueError(f"need 1 <= n <= n_tilde, got n={self.n}, n_tilde={self.n_tilde}")
        if self.g_count < 2:
            raise ValueError(f"g_count must be at least 2, got {self.g_count}")
        if not 1 <= self.anchor_index <= self.g_count:
            raise ValueError(f"anchor_index must lie in [1, {self.g_count}], got {self.anchor_index}")

    @property
    def u_grid(self) -> np.ndarray:
        return make_u_grid(self.g_count)

    @property
    def tx_positions(self) -> np.ndarray:
        return position_grid(self.m_tilde)

    @property
    def rx_positions(self) -> np.ndarray:
        return position_grid(self.n_tilde)


@dataclass(frozen=True)
class Placement:
    """Selected grid points (0-based) on the transmit and receive grids."""

    tx_indices: tuple[int, ...]
    rx_indices: tuple[int, ...]

    def __post_init__(self):
        tx = tuple(sorted(int(i) for i in self.tx_indices))
        rx = tuple(sorted(int(j) for j in self.rx_indices))
        if len(set(tx)) != len(tx) or len(set(rx)) != len(rx):
            raise ValueError("placement indices must be distinct")
        object.__setattr__(self, "tx_indices", tx)
        object.__setattr__(self, "rx_indices", rx)

    def validate(self, config: ProblemConfig) -> None:
        if len(self.tx_indices) != config.m or len(self.rx_indices) != config.n:
            raise ValueError(
                f"placement has {len(self.tx_indices)}x{len(self.rx_indices)} antennas, "
                f"expected {config.m}x{config.n}"
            )
        if self.tx_indices and not 0 <= self.tx_indices[0] <= self.tx_indices[-1] < config.m_tilde:
            raise ValueError("transmit index out of range")
        if self.rx_indices and not 0 <= self.rx_indices[0] <= self.rx_indices[-1] < config.n_tilde:
            raise ValueError("receive index out of range")

    def weights(self, config: ProblemConfig) -> tuple[np.ndarray, np.ndarray]:
        """Binary selection vectors ``(w_t, w_r)``."""
        w_t = np.zeros(config.m_tilde)
        w_r = np.zeros(config.n_tilde)
        w_t[list(self.tx_indices)] = 1.0
        w_r[list(self.rx_indices)] = 1.0
        return w_t, w_r

    @classmethod
    def from_weights(cls, w_t, w_r) -> "Placement":
        return cls(tuple(np.flatnonzero(np.asarray(w_t) > 0.5)), tuple(np.flatnonzero(np.asarray(w_r) > 0.5)))


@dataclass(frozen=True)
class Weights:
    """Relaxed selection vector on one grid.

    ``values`` lie in ``[0, 1]`` and sum to ``sum_target``; indices in
    ``eliminated`` are pinned to zero.
    """

    values: np.ndarray
    eliminated: frozenset = field(default_factory=frozenset)
    sum_target: float | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "eliminated", frozenset(int(j) for j in self.eliminated))
        if self.sum_target is None:
            object.__setattr__(self, "sum_target", float(values.sum()))
        if any(values[j] != 0.0 for j in self.eliminated):
            raise ValueError("eliminated entries must be exactly zero")

    def __len__(self):
        return self.values.size

    @property
    def surviving(self) -> np.ndarray:
        """Indices that have not been eliminated."""
        mask = np.ones(self.values.size, dtype=bool)
        mask[list(self.eliminated)] = False
        return np.flatnonzero(mask)

    @property
    def support_size(self) -> int:
        """Number of entries above the zero threshold."""
        return int(np.count_nonzero(self.values > ZERO_THRESHOLD))


def make_u_grid(g_count: int) -> np.ndarray:
    """Uniform DoA grid ``u_g = -1 + 2g/G`` for ``g = 1..G`` (ascending)."""
    if g_count < 2:
        raise ValueError(f"g_count must be at least 2, got {g_count}")
    return -1.0 + 2.0 * np.arange(1, g_count + 1) / g_count


def position_grid(size: int) -> np.ndarray:
    """Half-wavelength grid ``[0, 0.5, ..., (size-1)/2]`` in wavelengths."""
    if size < 1:
        raise ValueError("position grid must be nonempty")
    return 0.5 * np.arange(size)


def steering_vector(u: float, positions) -> np.ndarray:
    positions = np.asarray(positions, dtype=float)
    if positions.size == 0:
        raise ValueError("position grid must be nonempty")
    return np.exp(2j * np.pi * u * positions)


def steering_matrix(u_values, positions) -> np.ndarray:
    """Rows are the steering vectors of ``u_values`` over ``positions``."""
    return np.exp(2j * np.pi * np.outer(np.asarray(u_values, dtype=float), np.asarray(positions, dtype=float)))


@dataclass(frozen=True)
class DifferenceVectors:
    """Products ``conj(a_{g'}) * a_g`` for every ``g != g'``.

    Row ``k`` of ``a_diff``/``b_diff`` belongs to the 1-based grid index
    ``grid_indices[k]``.
    """

    a_diff: np.ndarray
    b_diff: np.ndarray
    grid_indices: np.ndarray
    anchor_index: int

    def tx(self, g: int) -> np.ndarray:
        return self.a_diff[self._row(g)]

    def rx(self, g: int) -> np.ndarray:
        return self.b_diff[self._row(g)]

    def _row(self, g: int) -> int:
        if g == self.anchor_index or not 1 <= g <= self.grid_indices.size + 1:
            raise KeyError(g)
        return g - 1 if g < self.anchor_index else g - 2


def difference_vectors(config: ProblemConfig) -> DifferenceVectors:
    u = make_u_grid(config.g_count)
    a_full = steering_matrix(u, config.tx_positions)
    b_full = steering_matrix(u, config.rx_positions)
    anchor = config.anchor_index - 1
    rows = np.delete(np.arange(config.g_count), anchor)
    a_diff = np.conj(a_full[anchor]) * a_full[rows]
    b_diff = np.conj(b_full[anchor]) * b_full[rows]
    for arr in (a_diff, b_diff, rows):
        arr.setflags(write=False)
    return DifferenceVectors(a_diff, b_diff, rows + 1, config.anchor_index)


def effective_column(w_t, w_r, g: int, config: ProblemConfig) -> np.ndarray:
    """Masked virtual-array column ``(w_r * b_g) kron (w_t * a_g)`` for 1-based ``g``."""
    w_t = np.asarray(getattr(w_t, "values", w_t), dtype=float)
    w_r = np.asarray(getattr(w_r, "values", w_r), dtype=float)
    if w_t.shape != (config.m_tilde,) or w_r.shape != (config.n_tilde,):
        raise ValueError(
            f"weights must have shapes ({config.m_tilde},) and ({config.n_tilde},), "
            f"got {w_t.shape} and {w_r.shape}"
        )
    if not 1 <= g <= config.g_count:
        raise ValueError(f"grid index {g} outside [1, {config.g_count}]")
    u = make_u_grid(config.g_count)[g - 1]
    a = steering_vector(u, config.tx_positions)
    b = steering_vector(u, config.rx_positions)
    return np.kron(w_r * b, w_t * a)


def measurement_matrix(placement: Placement, config: ProblemConfig) -> np.ndarray:
    """Compressed matrix ``Phi`` (``M*N x G``) holding only the active virtual elements."""
    u = make_u_grid(config.g_count)
    a = steering_matrix(u, config.tx_positions[list(placement.tx_indices)])
    b = steering_matrix(u, config.rx_positions[list(placement.rx_indices)])
    # column g is kron(b_g, a_g)
    return (b[:, :, None] * a[:, None, :]).reshape(config.g_count, -1).T


def coherence_of_matrix(phi: np.ndarray) -> float:
    """Largest normalized correlation between two distinct columns."""
    norms = np.linalg.norm(phi, axis=0)
    gram = np.abs(phi.conj().T @ phi) / np.outer(norms, norms)
    np.fill_diagonal(gram, 0.0)
    return float(min(gram.max(), 1.0))


def coherence_direct(placement: Placement, config: ProblemConfig) -> float:
    """Coherence from the materialized measurement matrix, over all column pairs."""
    placement.validate(config)
    return coherence_of_matrix(measurement_matrix(placement, config))


def correlation_profile(w_t, w_r, diffs: DifferenceVectors) -> np.ndarray:
    """``|w_r^T b_{g'g}| * |w_t^T a_{g'g}|`` for every ``g != g'``."""
    w_t = np.asarray(getattr(w_t, "values", w_t), dtype=float)
    w_r = np.asarray(getattr(w_r, "values", w_r), dtype=float)
    return np.abs(diffs.a_diff @ w_t) * np.abs(diffs.b_diff @ w_r)


def coherence_factorized(w_t, w_r, diffs: DifferenceVectors, anchor_index: int | None = None) -> float:
    """Coherence through the transmit/receive split against the anchor ``g'``.

    For relaxed weights the peak correlation is divided by
    ``||w_t||_1 * ||w_r||_1`` (which equals ``M*N`` under the sum
    constraints).
    """
    if anchor_index is not None and anchor_index != diffs.anchor_index:
        raise ValueError(f"difference vectors use anchor {diffs.anchor_index}, not {anchor_index}")
    w_t = np.asarray(getattr(w_t, "values", w_t), dtype=float)
    w_r = np.asarray(getattr(w_r, "values", w_r), dtype=float)
    scale = np.abs(w_t).sum() * np.abs(w_r).sum()
    if scale == 0:
        raise ValueError("weights must not vanish")
    return float(correlation_profile(w_t, w_r, diffs).max() / scale)
