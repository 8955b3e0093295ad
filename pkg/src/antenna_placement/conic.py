"""Min-max-modulus subproblems and a primal-dual interior-point solver for them.

The subproblem solved on one side of the array is::

    minimize    max_k  c_k |w^T v_k|
    subject to  sum(w) = S,  0 <= w <= 1,  w_j = 0 for j in J

with real ``w`` and complex ``v_k``. In epigraph form every modulus is a
3-dimensional second-order cone ``(t, c_k Re v_k^T w, c_k Im v_k^T w)``,
and the box is a pair of nonnegative orthants. :func:`solve` runs a
Mehrotra predictor-corrector method with Nesterov-Todd scaling on that
conic form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .array_model import DifferenceVectors

STEP_FRACTION = 0.99
FEASTOL = 1e-8


class InfeasibleProblemError(ValueError):
    """Raised when the box and sum constraints admit no point."""


@dataclass(frozen=True)
class ConeProblem:
    """Data of one min-max-modulus subproblem.

    Attributes:
        vectors: Complex array ``(K, D)``; row ``k`` is ``v_k``.
        coefficients: Nonnegative weights ``c_k`` (length ``K``).
        sum_target: Required sum ``S`` of the weights.
        eliminated: Indices forced to zero.
    """

    vectors: np.ndarray
    coefficients: np.ndarray
    sum_target: float
    eliminated: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        vectors = np.atleast_2d(np.asarray(self.vectors, dtype=complex))
        coefficients = np.asarray(self.coefficients, dtype=float).ravel()
        if coefficients.size != vectors.shape[0]:
            raise ValueError(f"{vectors.shape[0]} cone vectors but {coefficients.size} coefficients")
        if np.any(coefficients < 0):
            raise ValueError("cone coefficients must be nonnegative")
        eliminated = frozenset(int(j) for j in self.eliminated)
        if any(not 0 <= j < vectors.shape[1] for j in eliminated):
            raise ValueError("eliminated index out of range")
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "coefficients", coefficients)
        object.__setattr__(self, "eliminated", eliminated)
        object.__setattr__(self, "sum_target", float(self.sum_target))

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def free_indices(self) -> np.ndarray:
        mask = np.ones(self.dim, dtype=bool)
        mask[list(self.eliminated)] = False
        return np.flatnonzero(mask)

    def objective(self, w) -> float:
        """``max_k c_k |w^T v_k|`` (zero when there are no cones)."""
        if self.coefficients.size == 0:
            return 0.0
        return float(np.max(self.coefficients * np.abs(self.vectors @ np.asarray(w, dtype=float))))

    def check_feasible(self) -> None:
        free = self.dim - len(self.eliminated)
        if self.sum_target < 0 or self.sum_target > free:
            raise InfeasibleProblemError(
                f"sum target {self.sum_target} not attainable with {free} free weights in [0, 1]"
            )


@dataclass(frozen=True)
class SolveReport:
    """Result of a subproblem solve.

    ``status`` is ``"optimal"`` when the relative duality gap reached the
    requested tolerance, ``"max-iterations"`` when the iteration budget ran
    out, and ``"stalled"`` when the step length collapsed first; the last two
    carry the best iterate found.
    """

    weights: np.ndarray
    objective: float
    status: str
    gap: float
    iterations: int
    lower_bound: float = 0.0


def build_subproblem(diffs: DifferenceVectors, side: str, other_weights, sum_target: float,
                     eliminated=()) -> ConeProblem:
    """Subproblem for ``side`` with the opposite array frozen at ``other_weights``.

    For ``side="rx"`` the coefficients are ``|w_t^T a_{g'g}|`` and the cone
    vectors are the receive difference vectors; ``side="tx"`` is the mirror
    image.
    """
    other = np.asarray(getattr(other_weights, "values", other_weights), dtype=float)
    if side == "rx":
        own, opposite = diffs.b_diff, diffs.a_diff
    elif side == "tx":
        own, opposite = diffs.a_diff, diffs.b_diff
    else:
        raise ValueError(f"side must be 'tx' or 'rx', got {side!r}")
    if other.shape != (opposite.shape[1],):
        raise ValueError(f"other_weights must have length {opposite.shape[1]}, got {other.shape}")
    coefficients = np.abs(opposite @ other)
    return ConeProblem(own, coefficients, sum_target, frozenset(eliminated))


# -- cone algebra ---------------------------------------------------------
# Vectors in the product cone are flat: the first ``nl`` entries belong to the
# nonnegative orthant, the remainder is a stack of 3-blocks (t, x1, x2).

def _soc_det(blocks):
    r = np.hypot(blocks[:, 1], blocks[:, 2])
    return (blocks[:, 0] - r) * (blocks[:, 0] + r)


def _jordan_product(a, b, nl):
    out = np.empty_like(a)
    out[:nl] = a[:nl] * b[:nl]
    A, B = a[nl:].reshape(-1, 3), b[nl:].reshape(-1, 3)
    out_q = out[nl:].reshape(-1, 3)
    out_q[:, 0] = np.einsum("ij,ij->i", A, B)
    out_q[:, 1:] = A[:, :1] * B[:, 1:] + B[:, :1] * A[:, 1:]
    return out


def _jordan_divide(lam, r, nl):
    """Solve ``lam o u = r`` for ``u``."""
    out = np.empty_like(r)
    out[:nl] = r[:nl] / lam[:nl]
    L, R = lam[nl:].reshape(-1, 3), r[nl:].reshape(-1, 3)
    out_q = out[nl:].reshape(-1, 3)
    u0 = (L[:, 0] * R[:, 0] - L[:, 1] * R[:, 1] - L[:, 2] * R[:, 2]) / _soc_det(L)
    out_q[:, 0] = u0
    out_q[:, 1:] = (R[:, 1:] - u0[:, None] * L[:, 1:]) / L[:, :1]
    return out


def _is_interior(v, nl):
    if not np.all(v[:nl] > 0):
        return False
    V = v[nl:].reshape(-1, 3)
    return bool(np.all(V[:, 0] - np.hypot(V[:, 1], V[:, 2]) > 0))


def _max_step(v, d, nl):
    """Largest ``alpha`` with ``v + alpha*d`` in the cone (``v`` interior)."""
    alpha = np.inf
    neg = d[:nl] < 0
    if neg.any():
        alpha = np.min(-v[:nl][neg] / d[:nl][neg])
    V, D = v[nl:].reshape(-1, 3), d[nl:].reshape(-1, 3)
    # boundary crossing: first positive root of det(v + alpha d) = 0
    qa = D[:, 0] ** 2 - D[:, 1] ** 2 - D[:, 2] ** 2
    qb = 2 * (V[:, 0] * D[:, 0] - V[:, 1] * D[:, 1] - V[:, 2] * D[:, 2])
    qc = _soc_det(V)
    disc = qb * qb - 4 * qa * qc
    with np.errstate(divide="ignore", invalid="ignore"):
        root = np.sqrt(np.maximum(disc, 0.0))
        q = -0.5 * (qb + np.copysign(root, qb))
        roots = np.stack([q / qa, qc / q])
    ok = (roots > 0) & np.isfinite(roots) & (disc >= 0)
    linear = qa == 0
    if linear.any():
        with np.errstate(divide="ignore", invalid="ignore"):
            roots[0, linear] = np.where(qb[linear] < 0, -qc[linear] / qb[linear], np.inf)
        roots[1, linear] = np.inf
        ok[:, linear] = True
    roots = np.where(ok, roots, np.inf)
    if roots.size:
        alpha = min(alpha, float(roots.min()))
    return alpha


def _nt_scaling(s, z):
    """Nesterov-Todd scaling ``W`` (and its inverse) per 3-dim cone, ``W z = W^{-1} s``."""
    S, Z = s.reshape(-1, 3), z.reshape(-1, 3)
    s_det, z_det = _soc_det(S), _soc_det(Z)
    sn = S / np.sqrt(s_det)[:, None]
    zn = Z / np.sqrt(z_det)[:, None]
    gamma = np.sqrt(0.5 * (1.0 + np.einsum("ij,ij->i", sn, zn)))
    flip = np.array([1.0, -1.0, -1.0])
    wbar = (sn + zn * flip) / (2.0 * gamma)[:, None]
    v = wbar.copy()
    v[:, 0] += 1.0
    v /= np.sqrt(2.0 * (wbar[:, 0] + 1.0))[:, None]
    eta = (s_det / z_det) ** 0.25
    J = np.diag(flip)
    W = eta[:, None, None] * (2.0 * v[:, :, None] * v[:, None, :] - J)
    Jv = v * flip
    W_inv = (2.0 * Jv[:, :, None] * Jv[:, None, :] - J) / eta[:, None, None]
    return W, W_inv


def _merge_cones(R, I):
    """Drop duplicate cones; ``(R, I)`` and ``(R, -I)`` describe the same constraint."""
    lead = np.argmax(np.abs(I) > 1e-12, axis=1)
    sign = np.sign(I[np.arange(I.shape[0]), lead])
    sign[sign == 0] = 1.0
    key = np.round(np.hstack([R, I * sign[:, None]]), 11)
    _, keep = np.unique(key, axis=0, return_index=True)
    keep.sort()
    return R[keep], I[keep]


def _ipm(R, I, S, tolerance, max_iterations):
    """Interior-point core on normalized data. Returns ``(w, t, status, gap, iterations, lower)``."""
    K, n = R.shape
    m = n + 1
    nl = 2 * n

    def G_mul(x):
        w, t = x[:n], x[n]
        out = np.empty(nl + 3 * K)
        out[:n] = -w
        out[n:nl] = w
        q = out[nl:].reshape(-1, 3)
        q[:, 0] = -t
        q[:, 1] = -(R @ w)
        q[:, 2] = -(I @ w)
        return out

    def GT_mul(v):
        q = v[nl:].reshape(-1, 3)
        out = np.empty(m)
        out[:n] = -v[:n] + v[n:nl] - R.T @ q[:, 1] - I.T @ q[:, 2]
        out[n] = -q[:, 0].sum()
        return out

    Gq = np.zeros((K, 3, m))
    Gq[:, 0, n] = -1.0
    Gq[:, 1, :n] = -R
    Gq[:, 2, :n] = -I

    h = np.zeros(nl + 3 * K)
    h[n:nl] = 1.0
    c = np.zeros(m)
    c[n] = 1.0
    a_row = np.zeros(m)
    a_row[:n] = 1.0
    e = np.zeros(nl + 3 * K)
    e[:nl] = 1.0
    e[nl::3] = 1.0
    degree = nl + K

    # strictly feasible primal-dual start
    w0 = np.full(n, S / n)
    t0 = np.max(np.hypot(R @ w0, I @ w0)) + 1.0
    x = np.append(w0, t0)
    s = h - G_mul(x)
    z = np.zeros_like(s)
    z[:nl] = 1.0
    z[nl::3] = 1.0 / K
    y = 0.0

    best = None
    status = "max-iterations"
    it = 0
    for it in range(max_iterations + 1):
        rp = h - G_mul(x) - s
        rd = -(c + GT_mul(z) + a_row * y)
        rb = S - a_row @ x
        pobj = x[n]
        dobj = -h @ z - S * y
        gap = float(s @ z)
        rel_gap = gap / max(abs(pobj), 1e-3)
        feasible = np.linalg.norm(rp) <= FEASTOL and np.linalg.norm(rd) <= FEASTOL and abs(rb) <= FEASTOL
        if feasible and (best is None or rel_gap < best[1]):
            best = (x[:n].copy(), rel_gap, dobj)
        if feasible and rel_gap <= tolerance:
            status = "optimal"
            break
        if it == max_iterations:
            break

        Wl = np.sqrt(s[:nl] / z[:nl])
        W, W_inv = _nt_scaling(s[nl:], z[nl:])
        lam = np.empty_like(s)
        lam[:nl] = np.sqrt(s[:nl] * z[:nl])
        lam[nl:] = np.einsum("kij,kj->ki", W, z[nl:].reshape(-1, 3)).ravel()

        def W_mul(v):
            out = np.empty_like(v)
            out[:nl] = Wl * v[:nl]
            out[nl:] = np.einsum("kij,kj->ki", W, v[nl:].reshape(-1, 3)).ravel()
            return out

        def W_inv_mul(v):
            out = np.empty_like(v)
            out[:nl] = v[:nl] / Wl
            out[nl:] = np.einsum("kij,kj->ki", W_inv, v[nl:].reshape(-1, 3)).ravel()
            return out

        # K = G^T W^{-2} G through the triangular factor of W^{-1} G; the two
        # box rows of each weight collapse into a single diagonal entry
        lp_diag = np.zeros((n, m))
        lp_diag[np.arange(n), np.arange(n)] = np.sqrt(1.0 / Wl[:n] ** 2 + 1.0 / Wl[n:] ** 2)
        scaled = np.vstack([lp_diag, np.einsum("kij,kjm->kim", W_inv, Gq).reshape(-1, m)])
        Rf = sla.qr(scaled, mode="r", overwrite_a=True, check_finite=False)[0][:m]

        def k_solve(v):
            tmp = sla.solve_triangular(Rf, v, trans="T", check_finite=False)
            return sla.solve_triangular(Rf, tmp, check_finite=False)

        k_inv_a = k_solve(a_row)
        schur = a_row @ k_inv_a

        def base_step(r_d, r_p, r_b, q):
            Wq = W_mul(q)
            u = k_solve(r_d + GT_mul(W_inv_mul(W_inv_mul(r_p - Wq))))
            dy = (a_row @ u - r_b) / schur
            dx = u - k_inv_a * dy
            dz = W_inv_mul(W_inv_mul(G_mul(dx) - r_p + Wq))
            ds = r_p - G_mul(dx)
            return dx, dy, dz, ds

        def newton(rc):
            q = _jordan_divide(lam, rc, nl)
            dx, dy, dz, ds = base_step(rd, rp, rb, q)
            # one round of iterative refinement on the full linearization
            ex, ey, ez, es = base_step(
                rd - GT_mul(dz) - a_row * dy,
                rp - G_mul(dx) - ds,
                rb - a_row @ dx,
                q - W_inv_mul(ds) - W_mul(dz),
            )
            return dx + ex, dy + ey, dz + ez, ds + es

        lam_sq = _jordan_product(lam, lam, nl)
        dx, dy, dz, ds = newton(-lam_sq)
        alpha_aff = min(1.0, _max_step(s, ds, nl), _max_step(z, dz, nl))
        sigma = (1.0 - alpha_aff) ** 3
        mu = gap / degree
        correction = _jordan_product(W_inv_mul(ds), W_mul(dz), nl)
        dx, dy, dz, ds = newton(-lam_sq - correction + sigma * mu * e)
        alpha = min(1.0, STEP_FRACTION * min(_max_step(s, ds, nl), _max_step(z, dz, nl)))
        if not np.isfinite(alpha) or alpha < 1e-10:
            status = "stalled"
            break
        x_new, s_new, z_new = x + alpha * dx, s + alpha * ds, z + alpha * dz
        if not (_is_interior(s_new, nl) and _is_interior(z_new, nl)):
            status = "stalled"
            break
        x, s, z, y = x_new, s_new, z_new, y + alpha * dy

    if status == "optimal" or best is None:
        w, rel_gap, lower = x[:n], gap / max(abs(x[n]), 1e-3), -h @ z - S * y
    else:
        w, rel_gap, lower = best
    return w, status, float(rel_gap), it, float(lower)


def solve(problem: ConeProblem, tolerance: float = 1e-6, max_iterations: int = 200) -> SolveReport:
    """Minimize ``max_k c_k |w^T v_k|`` over the box/sum/elimination constraints.

    Parameters
    ----------
    problem : ConeProblem
        Subproblem data.
    tolerance : float
        Relative duality gap at which the iterate is accepted as optimal.
    max_iterations : int
        Iteration budget of the interior-point method.

    Returns
    -------
    SolveReport
        Weights satisfying the constraints, the attained objective
        ``max_k c_k |w^T v_k|`` and a certified lower bound on the optimum.

    Raises
    ------
    InfeasibleProblemError
        If ``S`` exceeds the number of free weights or is negative.
    """
    problem.check_feasible()
    free = problem.free_indices
    S = problem.sum_target
    weights = np.zeros(problem.dim)

    if S == free.size or S == 0:
        weights[free] = 1.0 if S else 0.0
        obj = problem.objective(weights)
        return SolveReport(weights, obj, "optimal", 0.0, 0, obj)

    coefficients = problem.coefficients
    active = coefficients > 1e-14 * coefficients.max() if coefficients.size else coefficients.astype(bool)
    if not active.any():
        weights[free] = S / free.size
        return SolveReport(weights, problem.objective(weights), "optimal", 0.0, 0, 0.0)

    scale = coefficients[active].max() * S
    c = coefficients[active] / scale
    V = problem.vectors[active][:, free]
    R, I = _merge_cones(c[:, None] * V.real, c[:, None] * V.imag)

    w, status, gap, iterations, lower = _ipm(R, I, S, tolerance, max_iterations)

    weights[free] = np.clip(w, 0.0, 1.0)
    return SolveReport(weights, problem.objective(weights), status, gap, iterations, max(lower, 0.0) * scale)


def oracle_solve(problem: ConeProblem, resolution: float = 1e-3, max_dim: int = 4) -> SolveReport:
    """Exhaustive grid search over the feasible set (test oracle).

    All but one free coordinate run over ``{0, r, 2r, ..., 1}``; the last one
    absorbs the sum constraint and the point is kept when it stays in
    ``[0, 1]``.
    """
    if problem.dim > max_dim:
        raise ValueError(f"oracle limited to dimension {max_dim}, got {problem.dim}")
    problem.check_feasible()
    free = problem.free_indices
    S = problem.sum_target
    steps = np.linspace(0.0, 1.0, int(round(1.0 / resolution)) + 1)

    if free.size == 0:
        points = np.zeros((1, problem.dim))
    else:
        if free.size == 1:
            grid = np.zeros((1, 0))
        else:
            axes = [steps] * (free.size - 1)
            grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, free.size - 1)
        last = S - grid.sum(axis=1)
        ok = (last >= -1e-12) & (last <= 1 + 1e-12)
        points = np.zeros((int(ok.sum()), problem.dim))
        points[:, free[:-1]] = grid[ok]
        points[:, free[-1]] = np.clip(last[ok], 0.0, 1.0)
    if points.shape[0] == 0:
        raise InfeasibleProblemError("no grid point satisfies the constraints at this resolution")
    if problem.coefficients.size:
        values = np.max(problem.coefficients * np.abs(points @ problem.vectors.T), axis=1)
    else:
        values = np.zeros(points.shape[0])
    k = int(np.argmin(values))
    return SolveReport(points[k], float(values[k]), "optimal", resolution, points.shape[0], float(values[k]))
