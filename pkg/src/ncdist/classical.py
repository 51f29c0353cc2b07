"""Finite metric spaces: Lipschitz constants, Monge-Kantorovich distances,
Hausdorff and infimum distances, and the equivalent state-space formulas.

Everything here is exact at desk scale.  ``mk_distance`` always solves
both the Lipschitz-ball supremum LP and the transport LP and reports the
gap, so the Kantorovich duality is checked on every call.  The two
alternative formulas for the Lipschitz constant (the state-pair ratio
and the level-set ratio) are provided for cross-verification against the
plain max-ratio definition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import EmptySetError, InvalidInputError, NumericalFailureError
from .numerics import LinearProgram, solve_lp

__all__ = [
    "FiniteMetricSpace",
    "MKResult",
    "lip",
    "mk_distance",
    "mk_distance_detailed",
    "hausdorff",
    "infimum",
    "lip_via_states",
    "lip_via_levels",
    "verify_embedding",
    "EmbeddingReport",
    "random_euclidean_space",
]


@dataclass(frozen=True)
class FiniteMetricSpace:
    """A finite metric space given by its distance matrix."""

    d: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        n = d.shape[0]
        if d.ndim != 2 or d.shape != (n, n):
            raise InvalidInputError("distance matrix must be square")
        if np.max(np.abs(d - d.T), initial=0.0) > 1e-12:
            raise InvalidInputError("distance matrix must be symmetric")
        if np.max(np.abs(np.diagonal(d)), initial=0.0) > 1e-12:
            raise InvalidInputError("self-distances must vanish")
        off = d + np.eye(n) * (1.0 if n else 0.0)
        if n > 1 and np.min(off + np.eye(n)) <= 0:
            # add identity twice so the diagonal can't trigger the check
            if np.min(d + 2 * np.max(d) * np.eye(n)) <= 0:
                raise InvalidInputError("distinct points must have positive distance")
        # Triangle inequality, checked exhaustively (desk scale).
        for k in range(n):
            viol = d - (d[:, k:k + 1] + d[k:k + 1, :])
            if np.max(viol, initial=0.0) > 1e-12:
                raise InvalidInputError("triangle inequality violated")
        object.__setattr__(self, "d", d)

    @property
    def size(self) -> int:
        return self.d.shape[0]


def random_euclidean_space(n: int, rng: np.random.Generator) -> FiniteMetricSpace:
    """Points drawn in the unit square with Euclidean distances.

    The triangle inequality holds by construction; nearly coincident
    points are resampled so distances stay bounded away from zero.
    """
    while True:
        pts = rng.random((n, 2))
        diff = pts[:, None, :] - pts[None, :, :]
        d = np.sqrt(np.sum(diff * diff, axis=2))
        if n == 1 or np.min(d + np.eye(n)) > 1e-3:
            return FiniteMetricSpace(d=d)


def lip(f: np.ndarray, space: FiniteMetricSpace) -> float:
    """Lipschitz constant: max over pairs of |f(x)-f(y)| / d(x,y)."""
    f = np.asarray(f, dtype=float)
    n = space.size
    if f.shape != (n,):
        raise InvalidInputError("function length does not match the space")
    if n < 2:
        return 0.0
    iu = np.triu_indices(n, k=1)
    return float(np.max(np.abs(f[iu[0]] - f[iu[1]]) / space.d[iu]))


@dataclass(frozen=True)
class MKResult:
    """Monge-Kantorovich distance with its built-in duality check."""

    value: float
    transport_value: float
    potential: np.ndarray
    plan: np.ndarray
    iterations: int

    @property
    def gap(self) -> float:
        return abs(self.value - self.transport_value)


def mk_distance_detailed(mu, nu, space: FiniteMetricSpace) -> MKResult:
    """Solve both sides of the Kantorovich duality.

    Primal: maximize ``<mu - nu, f>`` over the Lipschitz unit ball (one
    potential value per point, pinned at the first point).  Dual: the
    minimal-cost transport plan between the two measures.  The primal
    value is returned; the transport value rides along for the gap.
    """
    n = space.size
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if mu.shape != (n,) or nu.shape != (n,):
        raise InvalidInputError("measures must match the space size")
    for w in (mu, nu):
        if np.min(w) < -1e-12 or abs(np.sum(w) - 1.0) > 1e-12:
            raise InvalidInputError("measures must be probability vectors")
    if n == 1:
        return MKResult(0.0, 0.0, np.zeros(1), np.ones((1, 1)), 0)

    delta = mu - nu
    iu = np.triu_indices(n, k=1)
    k = iu[0].shape[0]
    rows = np.repeat(np.arange(2 * k), 2)
    cols = np.empty(4 * k, dtype=int)
    data = np.empty(4 * k)
    cols[0::4], cols[1::4] = iu[0], iu[1]
    cols[2::4], cols[3::4] = iu[0], iu[1]
    data[0::4], data[1::4] = 1.0, -1.0
    data[2::4], data[3::4] = -1.0, 1.0
    a_ub = sp.csr_matrix((data, (rows, cols)), shape=(2 * k, n))
    b_ub = np.repeat(space.d[iu], 2)
    bounds = np.column_stack([np.full(n, -np.inf), np.full(n, np.inf)])
    bounds[0] = (0.0, 0.0)
    primal = solve_lp(LinearProgram(objective=delta, a_ub=a_ub, b_ub=b_ub,
                                    bounds=bounds, maximize=True))
    if primal.status != "optimal":
        raise NumericalFailureError(f"Lipschitz-ball LP status {primal.status}")

    # Transport LP over the full coupling polytope.
    cost = space.d.ravel()
    row_idx = np.repeat(np.arange(n), n)
    col_idx = np.tile(np.arange(n), n)
    a_eq = sp.vstack([
        sp.csr_matrix((np.ones(n * n), (row_idx, np.arange(n * n))), shape=(n, n * n)),
        sp.csr_matrix((np.ones(n * n), (col_idx, np.arange(n * n))), shape=(n, n * n)),
    ], format="csr")
    b_eq = np.concatenate([mu, nu])
    dual = solve_lp(LinearProgram(
        objective=cost, a_eq=a_eq, b_eq=b_eq,
        bounds=np.column_stack([np.zeros(n * n), np.full(n * n, np.inf)])))
    if dual.status != "optimal":
        raise NumericalFailureError(f"transport LP status {dual.status}")

    value = abs(primal.objective_value)
    return MKResult(
        value=value,
        transport_value=dual.objective_value,
        potential=primal.primal,
        plan=dual.primal.reshape(n, n),
        iterations=primal.iterations + dual.iterations,
    )


def mk_distance(mu, nu, space: FiniteMetricSpace) -> float:
    return mk_distance_detailed(mu, nu, space).value


def _as_indices(subset, n: int) -> list[int]:
    idx = sorted(set(int(i) for i in subset))
    if idx and (idx[0] < 0 or idx[-1] >= n):
        raise InvalidInputError("subset index out of range")
    return idx


def hausdorff(subset_a, subset_b, space: FiniteMetricSpace) -> float:
    """Two-sided Hausdorff distance between nonempty subsets."""
    a = _as_indices(subset_a, space.size)
    b = _as_indices(subset_b, space.size)
    if not a or not b:
        raise EmptySetError("Hausdorff distance needs nonempty subsets")
    block = space.d[np.ix_(a, b)]
    return float(max(block.min(axis=1).max(), block.min(axis=0).max()))


def infimum(subset_a, subset_b, space: FiniteMetricSpace) -> float:
    """Least distance between two subsets; +inf when either is empty."""
    a = _as_indices(subset_a, space.size)
    b = _as_indices(subset_b, space.size)
    if not a or not b:
        return math.inf
    return float(space.d[np.ix_(a, b)].min())


def lip_via_states(f: np.ndarray, space: FiniteMetricSpace) -> float:
    """Lipschitz constant as the supremum of measure-pair difference ratios.

    Computed exactly as an LP in the coupling formulation: an unnormalized
    plan pi >= 0 over ordered pairs with total cost at most one maximizes
    ``sum pi_xy (f(x) - f(y))``.  The marginals of an optimal plan,
    normalized, realize an optimizing pair of measures, so the LP value
    is the supremum of |mu(f) - nu(f)| / rho_d(mu, nu).
    """
    f = np.asarray(f, dtype=float)
    n = space.size
    if n < 2:
        raise InvalidInputError("need at least two points")
    pairs = [(x, y) for x in range(n) for y in range(n) if x != y]
    obj = np.array([f[x] - f[y] for x, y in pairs])
    cost = np.array([space.d[x, y] for x, y in pairs])
    res = solve_lp(LinearProgram(
        objective=obj,
        a_ub=cost.reshape(1, -1), b_ub=np.array([1.0]),
        bounds=[(0, None)] * len(pairs), maximize=True,
    ))
    if res.status != "optimal":
        raise NumericalFailureError(f"state-ratio LP status {res.status}")
    return res.objective_value


def lip_via_levels(f: np.ndarray, space: FiniteMetricSpace) -> float:
    """Lipschitz constant from level sets and their infimum distances.

    Levels are grouped by exact value equality; the supremum runs over
    attained value pairs.  A single level gives an empty supremum, 0.
    """
    f = np.asarray(f, dtype=float)
    n = space.size
    if n < 2:
        raise InvalidInputError("need at least two points")
    levels: dict[float, list[int]] = {}
    for i, v in enumerate(f):
        levels.setdefault(float(v), []).append(i)
    values = sorted(levels)
    best = 0.0
    for i, lo in enumerate(values):
        for hi in values[i + 1:]:
            gap = hi - lo
            dist = infimum(levels[hi], levels[lo], space)
            best = max(best, gap / dist)
    return best


@dataclass(frozen=True)
class EmbeddingReport:
    """Classical vs state-space values for one (X, K, K') instance."""

    hausdorff_classical: float
    hausdorff_states: float
    infimum_classical: float
    infimum_states: float
    max_gap: float

    @property
    def hausdorff_deviation(self) -> float:
        return abs(self.hausdorff_classical - self.hausdorff_states)

    @property
    def infimum_deviation(self) -> float:
        return abs(self.infimum_classical - self.infimum_states)


def verify_embedding(subset_a, subset_b, space: FiniteMetricSpace) -> EmbeddingReport:
    """Compare classical H and I with their face-distance counterparts.

    The state side goes through the function algebra on the points, the
    metric seminorm, the faces attached to the subset indicators, and the
    exact enumeration + LP path of the hyperspace module.
    """
    from .algebra import Projection, commutative_algebra, face_from_projection
    from .hyper import hausdorff_distance, infimum_distance
    from .qmetric import from_metric

    a = _as_indices(subset_a, space.size)
    b = _as_indices(subset_b, space.size)
    if not a or not b:
        raise EmptySetError("verification needs nonempty subsets")
    algebra = commutative_algebra(space.size)
    fa = face_from_projection(Projection.from_indicator(algebra, a))
    fb = face_from_projection(Projection.from_indicator(algebra, b))
    seminorm = from_metric(space)
    h_states = hausdorff_distance(fa, fb, seminorm)
    i_states = infimum_distance(fa, fb, seminorm)
    return EmbeddingReport(
        hausdorff_classical=hausdorff(a, b, space),
        hausdorff_states=h_states.value,
        infimum_classical=infimum(a, b, space),
        infimum_states=i_states.value,
        max_gap=max(h_states.gap, i_states.gap),
    )
