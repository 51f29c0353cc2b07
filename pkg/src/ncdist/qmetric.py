"""Seminorms on self-adjoint parts and the induced state-space pseudo-metric.

Two seminorm variants are supported.

* Polyhedral: ``L(a) = max_k |<h_k, a>| / c_k`` for Hermitian traceless
  generators ``h_k`` and positive scales ``c_k``.  The induced distance
  between states is computed exactly by a pair of LPs (a supremum LP over
  the unit ball and the dual decomposition LP), so every result carries a
  certified primal/dual gap.

* Derivation: ``L(a) = max_j ||delta_j(a)||_op`` for linear maps
  ``delta_j`` on a real coordinate domain (``sum`` combination available
  as a configuration choice).  The distance is bracketed by a
  cutting-plane loop: rank-one singular probes of the violating
  ``delta_j(a*)`` are added as linear cuts until the relative gap closes.

The coordinate domain of a derivation seminorm need not be the algebra
itself: a linear realization map carries coordinates into the
self-adjoint part, which is how Fourier-truncated model spaces plug in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import numerics
from .algebra import AlgebraElement, FiniteAlgebra, State
from .errors import InvalidInputError, NumericalFailureError
from .numerics import LinearProgram, solve_lp

KERNEL_TOL = 1e-9
CUT_GAP_REL = 1e-4
CUT_BUDGET = 500

__all__ = [
    "PolyhedralSeminorm",
    "DerivationSeminorm",
    "CutPool",
    "RhoResult",
    "seminorm_eval",
    "kernel_check",
    "rho",
    "from_metric",
    "derivation_from_commutators",
    "scale_seminorm",
    "separation_check",
]


def _identity_vec(algebra: FiniteAlgebra) -> np.ndarray:
    return algebra.identity().to_vec()


@dataclass(frozen=True)
class PolyhedralSeminorm:
    """Max of scaled pairings against a finite family of Hermitian generators.

    ``gen_matrix`` holds the realified generators row by row (dense or
    scipy sparse); ``scales`` are the positive denominators.  Rows must
    pair to zero with the identity so that L(1) = 0.
    """

    algebra: FiniteAlgebra
    gen_matrix: object
    scales: np.ndarray

    def __post_init__(self):
        scales = np.atleast_1d(np.asarray(self.scales, dtype=float))
        if np.any(scales <= 0):
            raise InvalidInputError("polyhedral scales must be positive")
        g = self.gen_matrix
        if not sp.issparse(g):
            g = np.asarray(g, dtype=float)
            if g.ndim == 1:
                g = g.reshape(1, -1)
        if g.shape[0] != scales.shape[0]:
            raise InvalidInputError("need one scale per generator")
        if g.shape[1] != self.algebra.dim_sa:
            raise InvalidInputError("generator coordinates do not match the algebra")
        if g.shape[0]:
            tr = np.abs(g @ _identity_vec(self.algebra))
            if np.max(tr) > 1e-9:
                raise InvalidInputError("generators must pair to zero with the identity")
        object.__setattr__(self, "gen_matrix", g)
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "_cache", {})

    @staticmethod
    def from_elements(pairs) -> "PolyhedralSeminorm":
        """Build from ``[(h, c), ...]`` with h an AlgebraElement."""
        if not pairs:
            raise InvalidInputError("use an explicit empty matrix for a trivial seminorm")
        algebra = pairs[0][0].algebra
        rows = np.stack([h.to_vec() for h, _ in pairs])
        scales = np.array([c for _, c in pairs], dtype=float)
        return PolyhedralSeminorm(algebra=algebra, gen_matrix=rows, scales=scales)

    @property
    def num_generators(self) -> int:
        return self.gen_matrix.shape[0]

    def generator_element(self, k: int) -> AlgebraElement:
        row = self.gen_matrix[k]
        row = row.toarray().ravel() if sp.issparse(self.gen_matrix) else np.asarray(row).ravel()
        return AlgebraElement.from_vec(self.algebra, row)

    def eval_vec(self, avec: np.ndarray) -> float:
        if self.num_generators == 0:
            return 0.0
        vals = np.abs(np.asarray(self.gen_matrix @ avec).ravel()) / self.scales
        return float(np.max(vals))

    def traceless_nullspace(self) -> np.ndarray:
        """Orthonormal basis of {L = 0} intersected with the traceless part.

        Empty (shape ``(dim, 0)``) exactly when the generators span the full
        traceless subspace, which is the Rieffel kernel condition L(b) = 0
        iff b is a multiple of the identity.
        """
        cache = self._cache
        if "nullspace" not in cache:
            d = self.algebra.dim_sa
            g = self.gen_matrix
            if g.shape[0] == 0:
                gram = np.zeros((d, d))
            else:
                gram = g.T @ g
                if sp.issparse(gram):
                    gram = gram.toarray()
            w, v = np.linalg.eigh(np.asarray(gram))
            wmax = max(float(w[-1]), 1.0)
            null = v[:, w <= 1e-12 * wmax]
            e = _identity_vec(self.algebra)
            e = e / np.linalg.norm(e)
            resid = null - np.outer(e, e @ null)
            if resid.size:
                u, s, _ = np.linalg.svd(resid, full_matrices=False)
                null = u[:, s > 1e-8]
            else:
                null = np.zeros((d, 0))
            cache["nullspace"] = null
        return cache["nullspace"]


@dataclass(frozen=True)
class DerivationSeminorm:
    """Operator-norm seminorm of a family of derivations on a coordinate domain.

    ``images[j][b]`` has shape ``(dim, n_b, n_b)``: the block-b image of
    the r-th domain basis vector under delta_j.  ``eval_map`` realizes
    domain coordinates inside the realified self-adjoint part (identity
    when the domain is the algebra itself).
    """

    algebra: FiniteAlgebra
    dim: int
    eval_map: np.ndarray
    images: tuple
    combine: str = "max"

    def __post_init__(self):
        if self.combine not in ("max", "sum"):
            raise InvalidInputError("combine must be 'max' or 'sum'")
        em = np.asarray(self.eval_map, dtype=float)
        if em.shape != (self.algebra.dim_sa, self.dim):
            raise InvalidInputError("eval_map shape does not match algebra/domain")
        object.__setattr__(self, "eval_map", em)
        imgs = []
        for delta in self.images:
            blocks = []
            for n, arr in zip(self.algebra.blocks, delta):
                arr = np.asarray(arr, dtype=complex)
                if arr.shape != (self.dim, n, n):
                    raise InvalidInputError("derivation image tensor has the wrong shape")
                blocks.append(arr)
            imgs.append(tuple(blocks))
        if not imgs:
            raise InvalidInputError("need at least one derivation")
        object.__setattr__(self, "images", tuple(imgs))
        object.__setattr__(self, "_cache", {})

    @property
    def num_deltas(self) -> int:
        return len(self.images)

    def delta_blocks(self, j: int, coords: np.ndarray) -> list[np.ndarray]:
        return [np.tensordot(coords, img, axes=1) for img in self.images[j]]

    def delta_norm(self, j: int, coords: np.ndarray) -> float:
        return max(float(np.linalg.norm(m, 2)) for m in self.delta_blocks(j, coords))

    def eval_coords(self, coords: np.ndarray) -> float:
        coords = np.asarray(coords, dtype=float)
        norms = [self.delta_norm(j, coords) for j in range(self.num_deltas)]
        return float(max(norms)) if self.combine == "max" else float(sum(norms))

    def realize(self, coords: np.ndarray) -> AlgebraElement:
        return AlgebraElement.from_vec(self.algebra, self.eval_map @ np.asarray(coords, float))

    def is_ambient(self) -> bool:
        d = self.algebra.dim_sa
        return self.dim == d and np.array_equal(self.eval_map, np.eye(d))

    # -- cached spectral data -------------------------------------------

    def _stacked(self):
        """Realified stacked map coords -> all delta images, plus its SVD."""
        cache = self._cache
        if "svd" not in cache:
            rows = []
            for delta in self.images:
                for arr in delta:
                    flat = arr.reshape(self.dim, -1).T
                    rows.append(flat.real)
                    rows.append(flat.imag)
            t = np.vstack(rows)
            u, s, vt = np.linalg.svd(t, full_matrices=True)
            cache["svd"] = (s, vt)
        return cache["svd"]

    def kernel_basis(self) -> np.ndarray:
        """Orthonormal basis of the joint kernel of the realized deltas."""
        s, vt = self._stacked()
        smax = float(s[0]) if s.size else 0.0
        tol = max(1e-10, 1e-10 * smax)
        rank = int(np.sum(s > tol))
        return vt[rank:].T

    def cokernel_basis(self) -> np.ndarray:
        s, vt = self._stacked()
        smax = float(s[0]) if s.size else 0.0
        tol = max(1e-10, 1e-10 * smax)
        rank = int(np.sum(s > tol))
        return vt[:rank].T

    def box_bound(self) -> float:
        """Euclidean bound on the unit ball restricted to the cokernel.

        Uses ||M||_F <= sqrt(n) ||M||_op blockwise and the smallest
        nonzero singular value of the stacked derivation map.
        """
        s, _ = self._stacked()
        smax = float(s[0]) if s.size else 0.0
        tol = max(1e-10, 1e-10 * smax)
        nz = s[s > tol]
        if nz.size == 0:
            return 1.0
        factor = math.sqrt(self.num_deltas * sum(self.algebra.blocks))
        return 1.1 * factor / float(nz[-1])


Seminorm = PolyhedralSeminorm | DerivationSeminorm


class CutPool:
    """Reusable collection of linear cuts for one derivation seminorm.

    Cuts are facets of outer approximations of the unit ball; they are
    properties of the ball alone, so a pool built during one distance
    computation stays valid for every later one with the same seminorm.
    Passing a pool is opt-in; by default each call starts fresh.  The
    stacked matrix is cached and grown geometrically.
    """

    def __init__(self):
        self.count = 0
        self._store: np.ndarray | None = None

    def matrix(self, dim: int) -> np.ndarray:
        if self._store is None:
            return np.zeros((0, dim))
        return self._store[: self.count]

    def add(self, row: np.ndarray) -> None:
        row = np.asarray(row, dtype=float)
        if self._store is None:
            self._store = np.empty((16, row.shape[0]))
        elif self.count == self._store.shape[0]:
            grown = np.empty((2 * self.count, self._store.shape[1]))
            grown[: self.count] = self._store
            self._store = grown
        self._store[self.count] = row
        self.count += 1


@dataclass(frozen=True)
class RhoResult:
    """Distance value with certified bracket and certificate data.

    * polyhedral path: ``value`` is the supremum-LP optimum, ``upper``
      the dual decomposition value; the gap is at most 1e-7.
    * cutting-plane path: ``lower`` comes from a rescaled feasible point,
      ``upper`` from the final outer LP; ``converged`` records whether
      the relative gap closed within the cut budget.
    """

    value: float
    lower: float
    upper: float
    optimizer: AlgebraElement | None = None
    optimizer_coords: np.ndarray | None = None
    certificate: np.ndarray | None = None
    iterations: int = 0
    converged: bool = True
    method: str = "exact-lp"
    upper_history: tuple = ()

    @property
    def gap(self) -> float:
        if math.isinf(self.value):
            return 0.0
        return self.upper - self.lower

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)


def _infinite_result(method: str) -> RhoResult:
    inf = math.inf
    return RhoResult(value=inf, lower=inf, upper=inf, method=method, converged=True)


def seminorm_eval(L: Seminorm, a) -> float:
    """Evaluate a seminorm on a Hermitian element (or domain coordinates).

    Polyhedral seminorms take an :class:`AlgebraElement`.  Derivation
    seminorms take either raw domain coordinates or, when the domain is
    the algebra itself, a Hermitian element.
    """
    if isinstance(L, PolyhedralSeminorm):
        if not isinstance(a, AlgebraElement):
            raise InvalidInputError("polyhedral seminorms evaluate algebra elements")
        if not a.is_hermitian(1e-9):
            raise InvalidInputError("seminorms are evaluated on Hermitian elements")
        return L.eval_vec(a.to_vec())
    if isinstance(a, np.ndarray):
        return L.eval_coords(a)
    if hasattr(a, "coeff_vec"):
        return L.eval_coords(a.coeff_vec())
    if isinstance(a, AlgebraElement) and L.is_ambient():
        return L.eval_coords(a.to_vec())
    raise InvalidInputError("element is not in the domain of this derivation seminorm")


def kernel_check(L: Seminorm, algebra: FiniteAlgebra | None = None):
    """Whether the null space of L is exactly the span of the identity.

    Returns ``(ok, witness)``; the witness is a Hermitian element outside
    the scalars with L = 0 whenever the check fails.
    """
    algebra = algebra or L.algebra
    if algebra.blocks != L.algebra.blocks:
        raise InvalidInputError("seminorm lives on a different algebra")
    if isinstance(L, PolyhedralSeminorm):
        null = L.traceless_nullspace()
        if null.shape[1] == 0:
            return True, None
        return False, AlgebraElement.from_vec(algebra, null[:, 0])
    kern = L.kernel_basis()
    e = _identity_vec(algebra)
    e = e / np.linalg.norm(e)
    for i in range(kern.shape[1]):
        realized = L.eval_map @ kern[:, i]
        resid = realized - (e @ realized) * e
        if np.linalg.norm(resid) > 1e-8:
            return False, AlgebraElement.from_vec(algebra, resid / np.linalg.norm(resid))
    return True, None


# ---------------------------------------------------------------------------
# rho: the induced pseudo-metric on states
# ---------------------------------------------------------------------------

def _orient(delta: np.ndarray) -> np.ndarray:
    """Canonical sign so that swapping the two states runs the same LP."""
    for x in delta:
        if abs(x) > 1e-13:
            return delta if x > 0 else -delta
    return delta


def _rho_polyhedral(L: PolyhedralSeminorm, delta: np.ndarray) -> RhoResult:
    d = L.algebra.dim_sa
    delta = _orient(delta)
    null = L.traceless_nullspace()
    if null.shape[1]:
        if np.max(np.abs(null.T @ delta)) > KERNEL_TOL:
            return _infinite_result("exact-lp")
    g = L.gen_matrix
    k = L.num_generators
    if k == 0:
        # L == 0 everywhere; any nonzero functional is unbounded.
        if np.linalg.norm(delta) > KERNEL_TOL:
            return _infinite_result("exact-lp")
        zero = L.algebra.zero()
        return RhoResult(value=0.0, lower=0.0, upper=0.0, optimizer=zero)

    # Supremum LP: maximize delta.a over |<h_k,a>| <= c_k on the traceless
    # complement, with any residual kernel directions pinned to zero.
    e = _identity_vec(L.algebra)
    a_ub = sp.vstack([g, -g], format="csr") if sp.issparse(g) else np.vstack([g, -g])
    b_ub = np.concatenate([L.scales, L.scales])
    eq_rows = [e.reshape(1, -1)]
    if null.shape[1]:
        eq_rows.append(null.T)
    a_eq = np.vstack(eq_rows)
    b_eq = np.zeros(a_eq.shape[0])
    primal = solve_lp(LinearProgram(
        objective=delta, a_ub=a_ub, b_ub=b_ub, a_eq=a_eq, b_eq=b_eq,
        bounds=np.column_stack([np.full(d, -np.inf), np.full(d, np.inf)]),
        maximize=True,
    ))
    if primal.status != "optimal":
        raise NumericalFailureError(f"rho supremum LP ended with status {primal.status}")

    # Decomposition LP: minimize sum c_k |t_k| subject to sum t_k h_k = delta.
    gt = g.T
    a_eq2 = sp.hstack([gt, -gt], format="csr") if sp.issparse(g) else np.hstack([gt, -gt])
    dual = solve_lp(LinearProgram(
        objective=np.concatenate([L.scales, L.scales]),
        a_eq=a_eq2, b_eq=delta,
        bounds=np.column_stack([np.zeros(2 * k), np.full(2 * k, np.inf)]),
    ))
    if dual.status == "infeasible":
        return _infinite_result("exact-lp")
    if dual.status != "optimal":
        raise NumericalFailureError(f"rho decomposition LP ended with status {dual.status}")

    t = dual.primal[:k] - dual.primal[k:]
    value = primal.objective_value
    lo, hi = sorted((value, dual.objective_value))
    return RhoResult(
        value=value, lower=lo, upper=hi,
        optimizer=AlgebraElement.from_vec(L.algebra, primal.primal),
        certificate=t,
        iterations=primal.iterations + dual.iterations,
        converged=True, method="exact-lp",
    )


def _top_singular_cut(L: DerivationSeminorm, j: int, blocks: list[np.ndarray], basis: np.ndarray) -> np.ndarray:
    """Cut row from the top singular pair of the worst block of delta_j."""
    norms = [float(np.linalg.norm(m, 2)) for m in blocks]
    b = int(np.argmax(norms))
    u_m, s_m, vt_m = np.linalg.svd(blocks[b])
    u = u_m[:, 0]
    v = vt_m[0]
    img = L.images[j][b]
    # g_r = Re( u* delta_j(E_r) v ) for each domain basis direction E_r.
    raw = np.einsum("p,rpq,q->r", u.conj(), img, v.conj()).real
    return raw @ basis


def _rho_derivation(
    L: DerivationSeminorm,
    delta_vec: np.ndarray,
    *,
    gap_rel: float = CUT_GAP_REL,
    budget: int = CUT_BUDGET,
    pool: CutPool | None = None,
) -> RhoResult:
    kern = L.kernel_basis()
    if kern.shape[1]:
        realized = L.eval_map @ kern
        if np.max(np.abs(delta_vec @ realized), initial=0.0) > KERNEL_TOL:
            return _infinite_result("cutting-plane")
    basis = L.cokernel_basis()
    r = basis.shape[1]
    obj = basis.T @ (L.eval_map.T @ delta_vec)
    if r == 0 or np.linalg.norm(obj) <= 1e-14:
        return RhoResult(value=0.0, lower=0.0, upper=0.0,
                         optimizer=L.algebra.zero(), method="cutting-plane")
    box = L.box_bound()
    pool = pool if pool is not None else CutPool()
    bounds = [(-box, box)] * r
    lower = 0.0
    best_coords = None
    history = []
    cuts = 0
    converged = False
    upper = math.inf
    while True:
        rows = pool.matrix(r)
        lp = LinearProgram(
            objective=obj,
            a_ub=rows if rows.shape[0] else None,
            b_ub=np.ones(rows.shape[0]) if rows.shape[0] else None,
            bounds=bounds, maximize=True,
        )
        res = solve_lp(lp)
        if res.status != "optimal":
            raise NumericalFailureError(f"cutting-plane LP ended with status {res.status}")
        upper = res.objective_value
        history.append(upper)
        beta = res.primal
        coords = basis @ beta
        block_sets = [L.delta_blocks(j, coords) for j in range(L.num_deltas)]
        norms = [max(float(np.linalg.norm(m, 2)) for m in bs) for bs in block_sets]
        lval = max(norms) if L.combine == "max" else sum(norms)
        feas_scale = max(lval, 1.0)
        cand = float(obj @ beta) / feas_scale
        if cand > lower:
            lower = cand
            best_coords = coords / feas_scale
        if lval <= 1.0 + 1e-9:
            lower = max(lower, upper)
            best_coords = coords
            converged = True
            break
        if upper - lower <= gap_rel * max(abs(upper), 1e-12):
            converged = True
            break
        if cuts >= budget:
            break
        if L.combine == "max":
            j = int(np.argmax(norms))
            pool.add(_top_singular_cut(L, j, block_sets[j], basis))
        else:
            row = np.zeros(r)
            for j in range(L.num_deltas):
                row += _top_singular_cut(L, j, block_sets[j], basis)
            pool.add(row)
        cuts += 1
    optimizer = L.realize(best_coords) if best_coords is not None else None
    return RhoResult(
        value=lower, lower=lower, upper=max(upper, lower),
        optimizer=optimizer,
        optimizer_coords=best_coords,
        iterations=cuts, converged=converged, method="cutting-plane",
        upper_history=tuple(history),
    )


def rho(
    L: Seminorm,
    mu: State,
    nu: State,
    *,
    gap_rel: float = CUT_GAP_REL,
    budget: int = CUT_BUDGET,
    pool: CutPool | None = None,
) -> RhoResult:
    """Distance sup{ |mu(b) - nu(b)| : L(b) <= 1 } between two states.

    Infinite values are detected symbolically (the functional mu - nu
    fails to annihilate the kernel of L) and reported, not diverged on.
    """
    if mu.algebra.blocks != nu.algebra.blocks or mu.algebra.blocks != L.algebra.blocks:
        raise InvalidInputError("states and seminorm must share one algebra")
    delta = mu.to_vec() - nu.to_vec()
    if np.max(np.abs(delta), initial=0.0) <= 1e-14:
        method = "exact-lp" if isinstance(L, PolyhedralSeminorm) else "cutting-plane"
        return RhoResult(value=0.0, lower=0.0, upper=0.0,
                         optimizer=L.algebra.zero(), method=method)
    if isinstance(L, PolyhedralSeminorm):
        return _rho_polyhedral(L, delta)
    return _rho_derivation(L, _orient(delta), gap_rel=gap_rel, budget=budget, pool=pool)


def rho_vec(L: Seminorm, delta_vec: np.ndarray, *, pool: CutPool | None = None,
            gap_rel: float = CUT_GAP_REL, budget: int = CUT_BUDGET) -> RhoResult:
    """Dual norm of a realified traceless functional (internal hook)."""
    delta = np.asarray(delta_vec, dtype=float)
    if np.max(np.abs(delta), initial=0.0) <= 1e-14:
        method = "exact-lp" if isinstance(L, PolyhedralSeminorm) else "cutting-plane"
        return RhoResult(value=0.0, lower=0.0, upper=0.0, method=method)
    if isinstance(L, PolyhedralSeminorm):
        return _rho_polyhedral(L, delta)
    return _rho_derivation(L, _orient(delta), gap_rel=gap_rel, budget=budget, pool=pool)


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def from_metric(space) -> PolyhedralSeminorm:
    """Lipschitz seminorm of a finite metric space on the function algebra.

    One generator ``e_x - e_y`` with scale ``d(x, y)`` per unordered pair;
    evaluating it reproduces the max-ratio Lipschitz constant exactly.
    """
    from .algebra import commutative_algebra  # local to avoid cycle at import time

    n = space.size
    if n < 2:
        raise InvalidInputError("a metric seminorm needs at least two points")
    pairs = [(x, y) for x in range(n) for y in range(x + 1, n)]
    k = len(pairs)
    data = np.empty(2 * k)
    rows = np.empty(2 * k, dtype=int)
    cols = np.empty(2 * k, dtype=int)
    scales = np.empty(k)
    for i, (x, y) in enumerate(pairs):
        rows[2 * i] = rows[2 * i + 1] = i
        cols[2 * i], cols[2 * i + 1] = x, y
        data[2 * i], data[2 * i + 1] = 1.0, -1.0
        scales[i] = space.d[x, y]
    g = sp.csr_matrix((data, (rows, cols)), shape=(k, n))
    return PolyhedralSeminorm(algebra=commutative_algebra(n), gen_matrix=g, scales=scales)


def derivation_from_commutators(
    algebra: FiniteAlgebra,
    generators: list[AlgebraElement],
    combine: str = "max",
) -> DerivationSeminorm:
    """Seminorm ``a -> max_j ||[D_j, a]||`` from fixed elements D_j.

    The domain is the realified self-adjoint part of the algebra itself.
    """
    d = algebra.dim_sa
    basis_elems = [AlgebraElement.from_vec(algebra, row) for row in np.eye(d)]
    images = []
    for dj in generators:
        if dj.algebra.blocks != algebra.blocks:
            raise InvalidInputError("commutator generators must live on the algebra")
        per_block = []
        for b, n in enumerate(algebra.blocks):
            arr = np.empty((d, n, n), dtype=complex)
            for r, er in enumerate(basis_elems):
                arr[r] = dj.blocks[b] @ er.blocks[b] - er.blocks[b] @ dj.blocks[b]
            per_block.append(arr)
        images.append(tuple(per_block))
    return DerivationSeminorm(
        algebra=algebra, dim=d, eval_map=np.eye(d),
        images=tuple(images), combine=combine,
    )


def scale_seminorm(L: Seminorm, s: float) -> Seminorm:
    """The seminorm ``s * L`` for s > 0."""
    if s <= 0:
        raise InvalidInputError("scale must be positive")
    if isinstance(L, PolyhedralSeminorm):
        return PolyhedralSeminorm(algebra=L.algebra, gen_matrix=L.gen_matrix,
                                  scales=L.scales / s)
    images = tuple(tuple(s * arr for arr in delta) for delta in L.images)
    return DerivationSeminorm(algebra=L.algebra, dim=L.dim, eval_map=L.eval_map,
                              images=images, combine=L.combine)


# ---------------------------------------------------------------------------
# Separation probe (finite-dimensional surrogate of the metric condition)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeparationReport:
    trials: int
    distinct_pairs: int
    infinite_count: int
    min_ratio: float
    max_ratio: float

    @property
    def all_finite_positive(self) -> bool:
        return self.infinite_count == 0 and (self.distinct_pairs == 0 or self.min_ratio > 0)


def random_state(algebra: FiniteAlgebra, rng: np.random.Generator) -> State:
    """Full-rank-biased random density matrix (Ginibre blocks, random weights)."""
    weights = rng.dirichlet(np.ones(algebra.num_blocks))
    blocks = []
    for w, n in zip(weights, algebra.blocks):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        m = g @ g.conj().T
        blocks.append(w * m / np.trace(m).real)
    return State(algebra, tuple(blocks))


def random_hermitian(algebra: FiniteAlgebra, rng: np.random.Generator) -> AlgebraElement:
    blocks = []
    for n in algebra.blocks:
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        blocks.append(0.5 * (g + g.conj().T))
    return AlgebraElement(algebra, tuple(blocks))


def trace_norm_distance(mu: State, nu: State) -> float:
    total = 0.0
    for a, b in zip(mu.blocks, nu.blocks):
        w = np.linalg.eigvalsh(a - b)
        total += float(np.sum(np.abs(w)))
    return total


def separation_check(
    L: Seminorm,
    algebra: FiniteAlgebra,
    trials: int,
    seed: int,
) -> SeparationReport:
    """Sample state pairs and check rho is finite and positive between
    distinct states, reporting the observed ratio range against the
    trace-norm distance.
    """
    rng = np.random.default_rng(seed)
    ratios = []
    infinite = 0
    distinct = 0
    for _ in range(int(trials)):
        mu = random_state(algebra, rng)
        nu = random_state(algebra, rng)
        tdist = trace_norm_distance(mu, nu)
        if tdist <= 1e-12:
            continue
        distinct += 1
        res = rho(L, mu, nu)
        if res.is_infinite:
            infinite += 1
            continue
        ratios.append(res.value / tdist)
    return SeparationReport(
        trials=int(trials),
        distinct_pairs=distinct,
        infinite_count=infinite,
        min_ratio=float(min(ratios)) if ratios else math.nan,
        max_ratio=float(max(ratios)) if ratios else math.nan,
    )
