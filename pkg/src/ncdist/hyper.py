"""Infimum and Hausdorff distances between convex sets of states.

Two computation paths, selected automatically and recorded in the result:

* ``exact-lp`` for commutative algebras with polyhedral seminorms.  The
  infimum distance is a single LP in the joint variables (two measures
  plus a decomposition of their difference against the seminorm
  generators).  The Hausdorff distance enumerates the finitely many
  extreme points of each face and solves one LP per point.

* ``sampled`` for matrix blocks or derivation seminorms.  The infimum
  distance is bracketed from below by an LP relaxation (the PSD cone
  replaced by an adaptively grown family of linear eigenvector cuts, the
  metric by certified unit-ball members) and from above by
  projected-subgradient descent over feasible state pairs with
  multistart.  The Hausdorff outer supremum is estimated by batches of
  sampled boundary states with plateau detection, so its value is a
  lower-bound estimate by design and ``upper`` stays +inf.

Infimum distances to empty sets are +infinity; Hausdorff distance to an
empty set is an error.  Moment-set feasibility is decided by a phase-1
LP over the realified constraint system together with a PSD cut loop:
a negative relaxation value certifies emptiness, a PSD-feasible point
certifies nonemptiness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from . import numerics
from .algebra import (
    AlgebraElement,
    FiniteAlgebra,
    Projection,
    State,
    StateSet,
    face_from_projection,
    sample_extreme_states,
)
from .errors import EmptySetError, InvalidInputError, NumericalFailureError
from .numerics import LinearProgram, simplex_projection, solve_lp
from .qmetric import (
    CutPool,
    DerivationSeminorm,
    PolyhedralSeminorm,
    RhoResult,
    Seminorm,
    rho,
    rho_vec,
)

EXACT_GAP_TOL = 1e-6
FEAS_TOL = 1e-7

__all__ = ["DistanceResult", "SearchOptions", "infimum_distance", "hausdorff_distance"]


@dataclass(frozen=True)
class DistanceResult:
    """A set distance with certified bracket, witnesses and counters."""

    value: float
    lower: float
    upper: float
    method: str  # "exact-lp" | "sampled"
    witnesses: tuple[State, State] | None = None
    iterations: int = 0
    empty: bool = False

    @property
    def gap(self) -> float:
        if math.isinf(self.value):
            return 0.0
        return self.upper - self.lower


@dataclass(frozen=True)
class SearchOptions:
    """Budgets for the sampled path; the defaults match the module contract."""

    multistarts: int = 8
    descent_iters: int = 30
    outer_rounds: int = 50
    repair_rounds: int = 50
    batch_start: int = 64
    max_doublings: int = 3
    plateau_rel: float = 1e-3

    def light(self) -> "SearchOptions":
        """Reduced budgets for inner minimizations inside a Hausdorff sweep."""
        return replace(self, multistarts=1, descent_iters=8, outer_rounds=12)


# ---------------------------------------------------------------------------
# Realified set geometry
# ---------------------------------------------------------------------------

def _identity_vec(algebra: FiniteAlgebra) -> np.ndarray:
    return algebra.identity().to_vec()


def _hermitian_part(c: AlgebraElement) -> AlgebraElement:
    return 0.5 * (c + c.adjoint())


def _antihermitian_part(c: AlgebraElement) -> AlgebraElement:
    return (-0.5j) * (c - c.adjoint())


def _moment_rows(s: StateSet) -> tuple[np.ndarray, np.ndarray]:
    """Realified linear equalities mu(c_j) = z_j (real and imaginary parts)."""
    rows, rhs = [], []
    for c, z in zip(s.constraints, s.targets):
        rows.append(_hermitian_part(c).to_vec())
        rhs.append(z.real)
        rows.append(_antihermitian_part(c).to_vec())
        rhs.append(z.imag)
    if not rows:
        d = s.algebra.dim_sa
        return np.zeros((0, d)), np.zeros(0)
    return np.vstack(rows), np.asarray(rhs)


def _face_rows(s: StateSet) -> tuple[np.ndarray, np.ndarray]:
    """Equalities pinning the orthogonal complement of the compressed part.

    A state lies in the face of p iff rho = p rho p, i.e. its realified
    vector is in the range of the compression map X -> pXp.
    """
    algebra = s.algebra
    d = algebra.dim_sa
    p = s.projection
    cols = np.empty((d, d))
    for r in range(d):
        e = AlgebraElement.from_vec(algebra, np.eye(d)[r])
        compressed = AlgebraElement(
            algebra,
            tuple(pb @ eb @ pb for pb, eb in zip(p.blocks, e.blocks)),
        )
        cols[:, r] = compressed.to_vec()
    u, sv, _ = np.linalg.svd(cols)
    rank = int(np.sum(sv > 1e-10))
    rows = u[:, rank:].T
    return rows, np.zeros(rows.shape[0])


def _state_bounds(algebra: FiniteAlgebra) -> list:
    """Valid coordinate box for any density matrix (diagonal in [0,1],
    realified off-diagonals within [-0.8, 0.8])."""
    bounds = []
    for n in algebra.blocks:
        bounds.extend([(0.0, 1.0)] * n)
        bounds.extend([(-0.8, 0.8)] * (n * n - n))
    return bounds


def _vec_to_blocks(algebra: FiniteAlgebra, vec: np.ndarray) -> list[np.ndarray]:
    return list(AlgebraElement.from_vec(algebra, vec).blocks)


def _project_vec_to_density(algebra: FiniteAlgebra, vec: np.ndarray) -> np.ndarray:
    """Frobenius projection onto block densities with joint unit trace."""
    blocks = _vec_to_blocks(algebra, vec)
    decs = [np.linalg.eigh(0.5 * (b + b.conj().T)) for b in blocks]
    spectra = np.concatenate([w for w, _ in decs])
    proj = simplex_projection(spectra)
    out, pos = [], 0
    for (w, v), n in zip(decs, algebra.blocks):
        d = proj[pos:pos + n]
        pos += n
        m = (v * d) @ v.conj().T
        out.append(0.5 * (m + m.conj().T))
    return np.concatenate([numerics.hermitian_to_vec(b) for b in out])


def _min_block_eig(algebra: FiniteAlgebra, vec: np.ndarray) -> tuple[float, int, np.ndarray]:
    worst, worst_block, worst_vec = np.inf, -1, None
    for b, m in enumerate(_vec_to_blocks(algebra, vec)):
        w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
        if w.size and w[0] < worst:
            worst, worst_block, worst_vec = float(w[0]), b, v[:, 0]
    return worst, worst_block, worst_vec


def _eig_cut_row(algebra: FiniteAlgebra, block: int, psi: np.ndarray) -> np.ndarray:
    blocks = [np.zeros((n, n), dtype=complex) for n in algebra.blocks]
    blocks[block] = np.outer(psi, psi.conj())
    return AlgebraElement(algebra, tuple(blocks)).to_vec()


def _vec_state(algebra: FiniteAlgebra, vec: np.ndarray) -> State:
    blocks = _vec_to_blocks(algebra, vec)
    fixed = []
    for m in blocks:
        m = 0.5 * (m + m.conj().T)
        w, v = np.linalg.eigh(m)
        w = np.maximum(w, 0.0)
        fixed.append((v * w) @ v.conj().T)
    total = sum(float(np.trace(m).real) for m in fixed)
    fixed = [m / total for m in fixed]
    return State(algebra, tuple(fixed))


class _FaceGeometry:
    """Exact geometry of a face: affine rows and the nearest-point map."""

    def __init__(self, s: StateSet):
        self.set = s
        self.algebra = s.algebra
        self.rows, self.rhs = _face_rows(s)
        self._bases = []
        for p in s.projection.blocks:
            w, v = np.linalg.eigh(p)
            self._bases.append(v[:, w > 0.5])

    def feasible_point(self) -> np.ndarray:
        p = self.set.projection
        blocks = tuple(np.asarray(b, dtype=complex) / p.rank for b in p.blocks)
        return np.concatenate([numerics.hermitian_to_vec(b) for b in blocks])

    def project(self, vec: np.ndarray) -> tuple[np.ndarray, float]:
        """Compress to the range of p, project to a joint density, lift."""
        algebra = self.algebra
        blocks = _vec_to_blocks(algebra, vec)
        compressed, decs = [], []
        for u, b in zip(self._bases, blocks):
            m = u.conj().T @ b @ u
            m = 0.5 * (m + m.conj().T)
            compressed.append(m)
            decs.append(np.linalg.eigh(m) if m.size else (np.zeros(0), np.zeros((0, 0))))
        spectra = np.concatenate([w for w, _ in decs]) if decs else np.zeros(0)
        proj = simplex_projection(spectra) if spectra.size else spectra
        out, pos = [], 0
        for (w, v), u, n in zip(decs, self._bases, algebra.blocks):
            r = v.shape[0]
            d = proj[pos:pos + r]
            pos += r
            if r:
                m = (v * d) @ v.conj().T
                lifted = u @ m @ u.conj().T
            else:
                lifted = np.zeros((n, n), dtype=complex)
            out.append(lifted)
        return np.concatenate([numerics.hermitian_to_vec(b) for b in out]), 0.0


def _joint_eigenbasis(mats: list[np.ndarray], tol: float = 1e-8) -> np.ndarray | None:
    """Common unitary eigenbasis of commuting Hermitian matrices, or None.

    Diagonalizes the first matrix and refines recursively inside each
    degenerate eigenvalue cluster; verifies the result.
    """
    n = mats[0].shape[0]
    u = np.eye(n, dtype=complex)
    clusters = [list(range(n))]
    for a in mats:
        new_clusters = []
        for cl in clusters:
            sub = u[:, cl]
            b = sub.conj().T @ a @ sub
            b = 0.5 * (b + b.conj().T)
            w, v = np.linalg.eigh(b)
            u[:, cl] = sub @ v
            start = 0
            for i in range(1, len(cl) + 1):
                if i == len(cl) or w[i] - w[i - 1] > 1e-9:
                    new_clusters.append([cl[j] for j in range(start, i)])
                    start = i
        clusters = new_clusters
    for a in mats:
        d = u.conj().T @ a @ u
        if np.max(np.abs(d - np.diag(np.diagonal(d)))) > tol:
            return None
    return u


class _MomentGeometry:
    """Moment-set geometry: feasibility, singleton detection, projection.

    When the constraint elements commute blockwise (as the sub-circle
    constraints do), feasibility is decided exactly by an LP on the joint
    eigenbasis diagonal: the diagonal of any member is feasible for that
    LP, and any feasible diagonal lifts to a PSD member.  Otherwise a
    phase-1 cut loop maximizes the worst sampled eigenvalue form over the
    affine slice (negative optimum = certified empty).
    """

    def __init__(self, s: StateSet):
        self.set = s
        self.algebra = s.algebra
        rows, rhs = _moment_rows(s)
        e = _identity_vec(s.algebra)
        self.rows = np.vstack([rows, e.reshape(1, -1)])
        self.rhs = np.concatenate([rhs, [1.0]])
        self.cuts: list[np.ndarray] = []
        self._pinv = np.linalg.pinv(self.rows)
        self._witness: np.ndarray | None = None
        self._diag = self._diagonal_structure()

    def _diagonal_structure(self):
        """Joint eigenbasis of all constraint parts, when they commute."""
        parts_per_block: list[list[np.ndarray]] = [[] for _ in self.algebra.blocks]
        for c in self.set.constraints:
            for part in (_hermitian_part(c), _antihermitian_part(c)):
                for b, m in enumerate(part.blocks):
                    parts_per_block[b].append(m)
        bases = []
        for n, parts in zip(self.algebra.blocks, parts_per_block):
            if not parts:
                bases.append(np.eye(n, dtype=complex))
                continue
            for x in parts:
                for y in parts:
                    if np.max(np.abs(x @ y - y @ x)) > 1e-10:
                        return None
            u = _joint_eigenbasis(parts)
            if u is None:
                return None
            bases.append(u)
        # Realified constraint rows restricted to diagonal coordinates.
        total = sum(self.algebra.blocks)
        diag_rows = []
        for c, z in zip(self.set.constraints, self.set.targets):
            for part, val in ((_hermitian_part(c), z.real), (_antihermitian_part(c), z.imag)):
                row = []
                for u, m in zip(bases, part.blocks):
                    row.extend(np.real(np.diagonal(u.conj().T @ m @ u)))
                diag_rows.append((np.asarray(row), val))
        rows = np.vstack([r for r, _ in diag_rows]) if diag_rows else np.zeros((0, total))
        rhs = np.asarray([v for _, v in diag_rows])
        rows = np.vstack([rows, np.ones((1, total))])
        rhs = np.concatenate([rhs, [1.0]])
        return {"bases": bases, "rows": rows, "rhs": rhs}

    def _lift_diagonal(self, d: np.ndarray) -> np.ndarray:
        blocks, pos = [], 0
        for u, n in zip(self._diag["bases"], self.algebra.blocks):
            vals = np.maximum(d[pos:pos + n], 0.0)
            pos += n
            blocks.append((u * vals) @ u.conj().T)
        return np.concatenate([numerics.hermitian_to_vec(b) for b in blocks])

    def sample_members(self, rng: np.random.Generator, count: int) -> list[np.ndarray]:
        """Boundary-biased members of a commuting-constraint moment set.

        Constraints only see the diagonal profile in the joint eigenbasis,
        so a vertex of the diagonal polytope (random-objective LP) plus
        random phases per block yields a member on the extreme boundary of
        its profile fiber.  Returns [] when there is no diagonal structure.
        """
        if self._diag is None:
            return []
        rows, rhs = self._diag["rows"], self._diag["rhs"]
        total = rows.shape[1]
        bounds = np.column_stack([np.zeros(total), np.ones(total)])
        out = []
        for _ in range(count):
            res = solve_lp(LinearProgram(
                objective=rng.standard_normal(total), a_eq=rows, b_eq=rhs,
                bounds=bounds, maximize=True,
            ))
            if res.status != "optimal":
                return out
            d = np.maximum(res.primal, 0.0)
            blocks, pos = [], 0
            for u, n in zip(self._diag["bases"], self.algebra.blocks):
                vals = d[pos:pos + n]
                pos += n
                mass = float(np.sum(vals))
                if mass <= 1e-14:
                    blocks.append(np.zeros((n, n), dtype=complex))
                    continue
                psi = np.sqrt(vals) * np.exp(2j * np.pi * rng.random(n))
                blocks.append(u @ np.outer(psi, psi.conj()) @ u.conj().T)
            vec = np.concatenate([numerics.hermitian_to_vec(b) for b in blocks])
            out.append(vec)
        return out

    def singleton_vec(self) -> np.ndarray | None:
        """The unique member when the set is provably a single state.

        Needs commuting constraints, a unique feasible diagonal, and
        disjoint diagonal support within each block (PSD then kills all
        off-diagonal freedom).
        """
        if self._diag is None:
            return None
        rows, rhs = self._diag["rows"], self._diag["rhs"]
        total = rows.shape[1]
        lo = np.empty(total)
        hi = np.empty(total)
        bounds = np.column_stack([np.zeros(total), np.ones(total)])
        for i in range(total):
            obj = np.zeros(total)
            obj[i] = 1.0
            res_max = solve_lp(LinearProgram(objective=obj, a_eq=rows, b_eq=rhs,
                                             bounds=bounds, maximize=True))
            if res_max.status != "optimal":
                return None
            res_min = solve_lp(LinearProgram(objective=obj, a_eq=rows, b_eq=rhs,
                                             bounds=bounds))
            lo[i], hi[i] = res_min.objective_value, res_max.objective_value
            if hi[i] - lo[i] > 1e-10:
                return None
        d = 0.5 * (lo + hi)
        pos = 0
        for n in self.algebra.blocks:
            vals = d[pos:pos + n]
            pos += n
            for i in range(n):
                for j in range(i + 1, n):
                    if min(vals[i], vals[j]) > 1e-10:
                        return None
        return self._lift_diagonal(d)

    def affine_project(self, x: np.ndarray) -> np.ndarray:
        return x - self._pinv @ (self.rows @ x - self.rhs)

    def affine_residual(self, x: np.ndarray) -> float:
        return float(np.max(np.abs(self.rows @ x - self.rhs)))

    def feasible_point(self, rounds: int = 50) -> np.ndarray:
        """A PSD member of the affine slice, or a certified EmptySetError."""
        if self._witness is not None:
            return self._witness
        if self._diag is not None:
            rows, rhs = self._diag["rows"], self._diag["rhs"]
            total = rows.shape[1]
            res = solve_lp(LinearProgram(
                objective=np.zeros(total), a_eq=rows, b_eq=rhs,
                bounds=np.column_stack([np.zeros(total), np.ones(total)]),
            ))
            if res.status == "infeasible":
                raise EmptySetError("moment set is empty (no feasible diagonal)")
            if res.status != "optimal":
                raise NumericalFailureError(f"diagonal feasibility LP status {res.status}")
            self._witness = self._lift_diagonal(res.primal)
            return self._witness
        d = self.algebra.dim_sa
        bounds = _state_bounds(self.algebra) + [(-1.0, 1.0)]
        for _ in range(rounds):
            # maximize s subject to <psi psi*, x> >= s for collected cuts
            if self.cuts:
                a_ub = np.zeros((len(self.cuts), d + 1))
                for i, c in enumerate(self.cuts):
                    a_ub[i, :d] = -c
                    a_ub[i, d] = 1.0
                b_ub = np.zeros(len(self.cuts))
            else:
                a_ub = b_ub = None
            a_eq = np.hstack([self.rows, np.zeros((self.rows.shape[0], 1))])
            obj = np.zeros(d + 1)
            obj[d] = 1.0
            res = solve_lp(LinearProgram(objective=obj, a_eq=a_eq, b_eq=self.rhs,
                                         a_ub=a_ub, b_ub=b_ub, bounds=bounds,
                                         maximize=True))
            if res.status == "infeasible":
                raise EmptySetError("moment set is empty (affine slice infeasible)")
            if res.status != "optimal":
                raise NumericalFailureError(f"feasibility LP status {res.status}")
            if self.cuts and res.objective_value < -1e-9:
                raise EmptySetError(
                    "moment set is empty (no PSD point on the affine slice)"
                )
            x = res.primal[:d]
            weig, blk, psi = _min_block_eig(self.algebra, x)
            if weig >= -1e-12:
                self._witness = x
                return x
            self.cuts.append(_eig_cut_row(self.algebra, blk, psi))
        if weig >= -1e-9:
            self._witness = x
            return x
        raise NumericalFailureError(
            "moment-set feasibility undecided: PSD cut loop did not converge"
        )

    def project(self, vec: np.ndarray, rounds: int = 50) -> tuple[np.ndarray, float]:
        """Approximately nearest member: POCS first, cut-LP fallback."""
        y = np.array(vec, dtype=float)
        for _ in range(rounds):
            y = _project_vec_to_density(self.algebra, self.affine_project(y))
            if self.affine_residual(y) <= 1e-12:
                return y, 0.0
        resid = self.affine_residual(y)
        if resid <= 1e-10:
            return y, 0.0
        # L1-proximity LP over the affine slice with accumulated PSD cuts.
        d = self.algebra.dim_sa
        best = (y, resid)
        for _ in range(25):
            obj = np.concatenate([np.zeros(d), np.ones(d)])
            a_eq = np.hstack([self.rows, np.zeros((self.rows.shape[0], d))])
            ub_rows = [np.hstack([np.eye(d), -np.eye(d)]),
                       np.hstack([-np.eye(d), -np.eye(d)])]
            ub_rhs = [vec, -vec]
            if self.cuts:
                cut_block = np.zeros((len(self.cuts), 2 * d))
                for i, c in enumerate(self.cuts):
                    cut_block[i, :d] = -c
                ub_rows.append(cut_block)
                ub_rhs.append(np.zeros(len(self.cuts)))
            res = solve_lp(LinearProgram(
                objective=obj, a_eq=a_eq, b_eq=self.rhs,
                a_ub=np.vstack(ub_rows), b_ub=np.concatenate(ub_rhs),
                bounds=_state_bounds(self.algebra) + [(0, None)] * d,
            ))
            if res.status != "optimal":
                break
            x = res.primal[:d]
            weig, blk, psi = _min_block_eig(self.algebra, x)
            if weig >= -1e-12:
                return x, 0.0
            if weig >= -1e-9:
                best = (x, 0.0)
            self.cuts.append(_eig_cut_row(self.algebra, blk, psi))
        return best


def _geometry(s: StateSet):
    return _FaceGeometry(s) if s.kind == "face" else _MomentGeometry(s)


def _set_key(s: StateSet) -> bytes:
    """Deterministic ordering key so swapped arguments run identical code."""
    if s.kind == "face":
        data = np.concatenate([np.round(b, 12).ravel() for b in s.projection.blocks])
        return b"face" + data.tobytes()
    parts = [b"moment"]
    for c, z in zip(s.constraints, s.targets):
        parts.append(np.round(np.concatenate([b.ravel() for b in c.blocks]), 12).tobytes())
        parts.append(np.round(np.array([z.real, z.imag]), 12).tobytes())
    return b"".join(parts)


def _sets_equal(a: StateSet, b: StateSet) -> bool:
    return a is b or _set_key(a) == _set_key(b)


# ---------------------------------------------------------------------------
# Exact path (commutative algebra, polyhedral seminorm)
# ---------------------------------------------------------------------------

def _commutative_weights_rows(s: StateSet, n: int):
    """Bounds and extra equality rows for a commutative set in weight space."""
    bounds = [(0.0, 1.0)] * n
    rows = np.zeros((0, n))
    rhs = np.zeros(0)
    if s.kind == "face":
        keep = {i for i, b in enumerate(s.projection.blocks) if b[0, 0].real > 0.5}
        for i in range(n):
            if i not in keep:
                bounds[i] = (0.0, 0.0)
    else:
        rows, rhs = _moment_rows(s)
    return bounds, rows, rhs


def _commutative_set_feasible(s: StateSet, n: int) -> bool:
    bounds, rows, rhs = _commutative_weights_rows(s, n)
    a_eq = np.vstack([np.ones((1, n)), rows])
    b_eq = np.concatenate([[1.0], rhs])
    res = solve_lp(LinearProgram(objective=np.zeros(n), a_eq=a_eq, b_eq=b_eq, bounds=bounds))
    return res.status == "optimal"


def _exact_commutative_infimum(
    set_a: StateSet,
    set_b: StateSet,
    seminorm: PolyhedralSeminorm,
    pin_a: np.ndarray | None = None,
) -> DistanceResult:
    """One LP: minimize sum c_k |t_k| over decompositions of mu - nu with
    mu in A (optionally pinned to a point mass) and nu in B."""
    algebra = set_a.algebra
    n = algebra.num_blocks
    g = seminorm.gen_matrix
    k = seminorm.num_generators
    gt = g.T  # (n, k), sparse or dense

    bounds_a, rows_a, rhs_a = _commutative_weights_rows(set_a, n)
    bounds_b, rows_b, rhs_b = _commutative_weights_rows(set_b, n)
    if pin_a is not None:
        bounds_a = [(float(v), float(v)) for v in pin_a]

    sparse = sp.issparse(g)

    def hstack(parts):
        if sparse:
            return sp.hstack([sp.csr_matrix(p) for p in parts], format="csr")
        return np.hstack(parts)

    def vstack(parts):
        parts = [p for p in parts if p.shape[0]]
        if sparse:
            return sp.vstack([sp.csr_matrix(p) for p in parts], format="csr")
        return np.vstack(parts)

    eye = sp.eye(n, format="csr") if sparse else np.eye(n)
    zeros_k = np.zeros((1, k))
    # Balance rows: sum_k t_k h_k - mu + nu = 0.
    balance = hstack([-eye, eye, gt, -gt])
    norm_mu = hstack([np.ones((1, n)), np.zeros((1, n)), zeros_k, zeros_k])
    norm_nu = hstack([np.zeros((1, n)), np.ones((1, n)), zeros_k, zeros_k])
    blocks = [balance, norm_mu, norm_nu]
    rhs = [np.zeros(n), np.array([1.0]), np.array([1.0])]
    if rows_a.shape[0]:
        blocks.append(hstack([rows_a, np.zeros((rows_a.shape[0], n)),
                              np.zeros((rows_a.shape[0], 2 * k))]))
        rhs.append(rhs_a)
    if rows_b.shape[0]:
        blocks.append(hstack([np.zeros((rows_b.shape[0], n)), rows_b,
                              np.zeros((rows_b.shape[0], 2 * k))]))
        rhs.append(rhs_b)
    a_eq = vstack(blocks)
    b_eq = np.concatenate(rhs)
    objective = np.concatenate([np.zeros(2 * n), seminorm.scales, seminorm.scales])
    bounds = np.vstack([
        np.asarray(bounds_a, dtype=float),
        np.asarray(bounds_b, dtype=float),
        np.column_stack([np.zeros(2 * k), np.full(2 * k, np.inf)]),
    ])
    res = solve_lp(LinearProgram(objective=objective, a_eq=a_eq, b_eq=b_eq, bounds=bounds))
    if res.status == "infeasible":
        empty_a = not _commutative_set_feasible(set_a, n)
        empty_b = not _commutative_set_feasible(set_b, n)
        if empty_a or empty_b:
            return DistanceResult(value=math.inf, lower=math.inf, upper=math.inf,
                                  method="exact-lp", empty=True, iterations=res.iterations)
        # Nonempty sets but no decomposition: the seminorm kernel obstructs.
        return DistanceResult(value=math.inf, lower=math.inf, upper=math.inf,
                              method="exact-lp", iterations=res.iterations)
    if res.status != "optimal":
        raise NumericalFailureError(f"infimum LP status {res.status}")
    mu = res.primal[:n]
    nu = res.primal[n:2 * n]
    value = res.objective_value
    witnesses = (State.from_weights(algebra, simplex_projection(mu)),
                 State.from_weights(algebra, simplex_projection(nu)))
    return DistanceResult(value=value, lower=value, upper=value,
                          method="exact-lp", witnesses=witnesses,
                          iterations=res.iterations)


def _reduce_commutative_to_face(s: StateSet) -> StateSet | None:
    """Rewrite a commutative moment set as a face when it provably is one.

    The support is found by per-coordinate max LPs; the set equals the
    face of its support indicator iff every point mass on the support is
    a member (a convex set containing all extreme points of a face that
    contains it must be that face).
    """
    if s.kind == "face":
        return s
    n = s.algebra.num_blocks
    bounds, rows, rhs = _commutative_weights_rows(s, n)
    a_eq = np.vstack([np.ones((1, n)), rows])
    b_eq = np.concatenate([[1.0], rhs])
    support = []
    for x in range(n):
        obj = np.zeros(n)
        obj[x] = 1.0
        res = solve_lp(LinearProgram(objective=obj, a_eq=a_eq, b_eq=b_eq,
                                     bounds=bounds, maximize=True))
        if res.status == "infeasible":
            return None
        if res.status != "optimal":
            raise NumericalFailureError(f"support LP status {res.status}")
        if res.objective_value > 1e-9:
            support.append(x)
    if not support:
        return None
    for x in support:
        delta = np.zeros(n)
        delta[x] = 1.0
        state = State.from_weights(s.algebra, delta)
        if not s.contains(state, tol=1e-8):
            return None
    return face_from_projection(Projection.from_indicator(s.algebra, support))


# ---------------------------------------------------------------------------
# Sampled path (matrix blocks / derivation seminorms)
# ---------------------------------------------------------------------------

class _SampledEngine:
    """Lower-bound LP + descent machinery for one (A, B, L) triple.

    The engine may be reused for many pinned source points against the
    same target: PSD cuts on the target side and unit-ball members are
    valid across calls and accumulate.
    """

    def __init__(self, set_a: StateSet, set_b: StateSet, seminorm: Seminorm,
                 rng: np.random.Generator, opts: SearchOptions, pool: CutPool | None):
        self.algebra = set_a.algebra
        self.set_a = set_a
        self.set_b = set_b
        self.geom_a = _geometry(set_a)
        self.geom_b = _geometry(set_b)
        self.L = seminorm
        self.rng = rng
        self.opts = opts
        self.pool = pool if pool is not None else CutPool()
        self.psd_cuts: list[tuple[int, np.ndarray]] = []  # (side, row), side 0=mu 1=nu
        self.ball_members: list[np.ndarray] = []
        self.rho_evals = 0
        if isinstance(seminorm, DerivationSeminorm):
            # Seed the unit-ball members with normalized realized cokernel
            # directions, so the relaxation sees every direction at once
            # instead of growing cuts from nothing (Kelley cold start).
            basis = seminorm.cokernel_basis()
            for i in range(basis.shape[1]):
                coords = basis[:, i]
                norm = seminorm.eval_coords(coords)
                if norm > 1e-12:
                    self.ball_members.append(seminorm.eval_map @ (coords / norm))

    # -- rho with shared cut pool --------------------------------------

    def _rho(self, delta: np.ndarray, tight: bool = False) -> RhoResult:
        # Loose gaps steer the search; only final evaluations need the
        # contract tolerance.
        self.rho_evals += 1
        gap = 1e-4 if tight else 3e-3
        return rho_vec(self.L, delta, pool=self.pool, gap_rel=gap)

    def _remember_ball_member(self, res: RhoResult) -> None:
        if res.optimizer is None or res.is_infinite:
            return
        self.ball_members.append(res.optimizer.to_vec())

    # -- lower bound LP --------------------------------------------------

    def _lower_lp(self, pin_a: np.ndarray | None) -> tuple[float, np.ndarray, np.ndarray]:
        d = self.algebra.dim_sa
        e = _identity_vec(self.algebra)
        if pin_a is None:
            rows_a, rhs_a = self.geom_a.rows, self.geom_a.rhs
        else:
            # The pin determines mu completely; its own set rows would only
            # re-impose the membership the sample already satisfies (to
            # sampling tolerance) and can make exact equalities inconsistent.
            rows_a, rhs_a = np.zeros((0, d)), np.zeros(0)
        rows_b, rhs_b = self.geom_b.rows, self.geom_b.rhs
        state_bounds = _state_bounds(self.algebra)

        if isinstance(self.L, PolyhedralSeminorm):
            g = self.L.gen_matrix
            g = g.toarray() if sp.issparse(g) else g
            k = g.shape[0]
            width = 2 * d + 2 * k
            # balance: sum t_k h_k - mu + nu = 0
            bal = np.zeros((d, width))
            bal[:, :d] = -np.eye(d)
            bal[:, d:2 * d] = np.eye(d)
            bal[:, 2 * d:2 * d + k] = g.T
            bal[:, 2 * d + k:] = -g.T
            eq_rows = [bal]
            eq_rhs = [np.zeros(d)]
            objective = np.concatenate([np.zeros(2 * d), self.L.scales, self.L.scales])
            bounds = list(state_bounds) + list(state_bounds) + [(0, None)] * (2 * k)
        else:
            width = 2 * d + 1
            eq_rows, eq_rhs = [], []
            objective = np.zeros(width)
            objective[-1] = 1.0
            bounds = list(state_bounds) + list(state_bounds) + [(0, None)]

        trace_nu = np.zeros((1, width)); trace_nu[0, d:2 * d] = e
        if pin_a is None:
            trace_mu = np.zeros((1, width)); trace_mu[0, :d] = e
            eq_rows.append(trace_mu)
            eq_rhs.append(np.array([1.0]))
        eq_rows.append(trace_nu)
        eq_rhs.append(np.array([1.0]))
        for rows, rhs, off in ((rows_a, rhs_a, 0), (rows_b, rhs_b, d)):
            if rows.shape[0]:
                block = np.zeros((rows.shape[0], width))
                block[:, off:off + d] = rows
                eq_rows.append(block)
                eq_rhs.append(rhs)
        if pin_a is not None:
            block = np.zeros((d, width))
            block[:, :d] = np.eye(d)
            eq_rows.append(block)
            eq_rhs.append(pin_a)

        ub_rows, ub_rhs = [], []
        for side, row in self.psd_cuts:
            if side == 0 and pin_a is not None:
                continue
            r = np.zeros(width)
            r[side * d:(side + 1) * d] = -row
            ub_rows.append(r)
            ub_rhs.append(0.0)
        if not isinstance(self.L, PolyhedralSeminorm):
            for a in self.ball_members:
                for sign in (1.0, -1.0):
                    r = np.zeros(width)
                    r[:d] = sign * a
                    r[d:2 * d] = -sign * a
                    r[-1] = -1.0
                    ub_rows.append(r)
                    ub_rhs.append(0.0)

        res = solve_lp(LinearProgram(
            objective=objective,
            a_eq=np.vstack(eq_rows), b_eq=np.concatenate(eq_rhs),
            a_ub=np.vstack(ub_rows) if ub_rows else None,
            b_ub=np.asarray(ub_rhs) if ub_rows else None,
            bounds=bounds,
        ))
        if res.status == "infeasible":
            raise EmptySetError("relaxed infimum LP infeasible")
        if res.status != "optimal":
            raise NumericalFailureError(f"relaxed infimum LP status {res.status}")
        return res.objective_value, res.primal[:d], res.primal[d:2 * d]

    def _add_psd_cuts(self, mu: np.ndarray, nu: np.ndarray, pin_a: np.ndarray | None) -> bool:
        added = False
        for side, vec in ((0, mu), (1, nu)):
            if side == 0 and pin_a is not None:
                continue
            weig, blk, psi = _min_block_eig(self.algebra, vec)
            if weig < -1e-9:
                self.psd_cuts.append((side, _eig_cut_row(self.algebra, blk, psi)))
                added = True
        return added

    # -- descent ---------------------------------------------------------

    def _project(self, side: int, vec: np.ndarray) -> tuple[np.ndarray, float]:
        geom = self.geom_a if side == 0 else self.geom_b
        return geom.project(vec)

    def _descend(self, mu0: np.ndarray, nu0: np.ndarray, pin_a: np.ndarray | None,
                 steps: int) -> tuple[float, np.ndarray, np.ndarray]:
        mu, nu = np.array(mu0), np.array(nu0)
        res = self._rho(mu - nu)
        best = (res.value, mu.copy(), nu.copy())
        self._remember_ball_member(res)
        for k in range(steps):
            if res.is_infinite or res.optimizer is None:
                break
            direction = res.optimizer.to_vec()
            nrm = np.linalg.norm(direction)
            if nrm < 1e-14:
                break
            direction = direction / nrm
            eta = 0.5 * np.linalg.norm(mu - nu) / math.sqrt(k + 1.0)
            if eta < 1e-12:
                break
            if pin_a is None:
                mu_c, ra = self._project(0, mu - eta * direction)
            else:
                mu_c, ra = mu, 0.0
            nu_c, rb = self._project(1, nu + eta * direction)
            if max(ra, rb) > FEAS_TOL:
                break
            mu, nu = mu_c, nu_c
            res = self._rho(mu - nu)
            self._remember_ball_member(res)
            if res.value < best[0]:
                best = (res.value, mu.copy(), nu.copy())
        return best

    # -- main driver -------------------------------------------------------

    def infimum(self, pin_a: np.ndarray | None = None) -> DistanceResult:
        opts = self.opts
        feas_a = pin_a if pin_a is not None else self.geom_a.feasible_point()
        feas_b = self.geom_b.feasible_point()

        lower = 0.0
        best = (math.inf, feas_a, feas_b)

        def bracket_tight() -> bool:
            return best[0] - lower <= max(1e-6, 1e-3 * abs(best[0]))

        # Alternate between tightening the relaxation (PSD eigenvector cuts,
        # unit-ball members) and evaluating rho at its projected point.
        for _ in range(opts.outer_rounds):
            val, mu_rel, nu_rel = self._lower_lp(pin_a)
            lower = max(lower, val)
            added = self._add_psd_cuts(mu_rel, nu_rel, pin_a)
            pm, ra = (pin_a, 0.0) if pin_a is not None else self._project(0, mu_rel)
            pn, rb = self._project(1, nu_rel)
            if max(ra, rb) <= FEAS_TOL:
                r0 = self._rho(pm - pn)
                self._remember_ball_member(r0)
                if r0.value < best[0]:
                    best = (r0.value, pm, pn)
            if bracket_tight():
                break
            if not isinstance(self.L, PolyhedralSeminorm):
                res = self._rho(mu_rel - nu_rel)
                if res.is_infinite:
                    break
                self._remember_ball_member(res)
                if res.value > val + 1e-9:
                    added = True
            if not added:
                break

        if not bracket_tight() and not math.isinf(best[0]):
            starts = [(best[1], best[2]), (feas_a, feas_b)]
            for _ in range(max(opts.multistarts - len(starts), 0)):
                if pin_a is not None:
                    noise_a, ra = feas_a, 0.0
                else:
                    noise_a, ra = self._project(
                        0, feas_a + 0.3 * self.rng.standard_normal(feas_a.shape))
                noise_b, rb = self._project(
                    1, feas_b + 0.3 * self.rng.standard_normal(feas_b.shape))
                if max(ra, rb) <= FEAS_TOL:
                    starts.append((noise_a, noise_b))
            for mu0, nu0 in starts:
                val, mu, nu = self._descend(mu0, nu0, pin_a, opts.descent_iters)
                if val < best[0]:
                    best = (val, mu, nu)
                if bracket_tight():
                    break
        if math.isinf(best[0]):
            r0 = self._rho(feas_a - feas_b, tight=True)
            best = (r0.value, feas_a, feas_b)
            upper_cert = r0.upper
        else:
            final = self._rho(best[1] - best[2], tight=True)
            best = (final.value, best[1], best[2])
            upper_cert = final.upper
        lower = min(lower, best[0])  # guard solver noise on tiny instances
        witnesses = (_vec_state(self.algebra, best[1]), _vec_state(self.algebra, best[2]))
        return DistanceResult(value=best[0], lower=max(lower, 0.0),
                              upper=max(upper_cert, best[0]),
                              method="sampled", witnesses=witnesses,
                              iterations=self.rho_evals)


# ---------------------------------------------------------------------------
# Public entry points
# ---------------------------------------------------------------------------

def _check_same_algebra(set_a: StateSet, set_b: StateSet, seminorm: Seminorm) -> None:
    if set_a.algebra.blocks != set_b.algebra.blocks:
        raise InvalidInputError("state sets live on different algebras")
    if set_a.algebra.blocks != seminorm.algebra.blocks:
        raise InvalidInputError("seminorm lives on a different algebra")


def _is_exact_path(set_a: StateSet, set_b: StateSet, seminorm: Seminorm) -> bool:
    return set_a.algebra.is_commutative and isinstance(seminorm, PolyhedralSeminorm)


def _zero_result(set_a: StateSet, method: str) -> DistanceResult:
    w = None
    if set_a.is_singleton():
        s = set_a.singleton_state()
        w = (s, s)
    return DistanceResult(value=0.0, lower=0.0, upper=0.0, method=method, witnesses=w)


def _singleton_state(s: StateSet) -> State | None:
    """The unique member of a provably singleton set (None otherwise).

    Rank-one faces are singletons outright; commuting-constraint moment
    sets are singletons when their feasible diagonal is unique with
    disjoint support (PSD removes the remaining off-diagonal freedom).
    """
    if s.kind == "face":
        return s.singleton_state() if s.is_singleton() else None
    vec = _MomentGeometry(s).singleton_vec()
    if vec is None:
        return None
    return _vec_state(s.algebra, vec)


def infimum_distance(
    set_a: StateSet,
    set_b: StateSet,
    seminorm: Seminorm,
    *,
    seed: int = 0,
    options: SearchOptions | None = None,
    pool: CutPool | None = None,
) -> DistanceResult:
    """Least rho_L distance between two convex sets of states.

    Empty sets give +infinity (the paper's convention); commutative
    algebras with polyhedral seminorms are solved by one exact LP, the
    rest by the bounded sampled path.
    """
    _check_same_algebra(set_a, set_b, seminorm)
    opts = options or SearchOptions()
    method = "exact-lp" if _is_exact_path(set_a, set_b, seminorm) else "sampled"
    if _sets_equal(set_a, set_b):
        return _zero_result(set_a, method)

    swap = _set_key(set_a) > _set_key(set_b)
    a, b = (set_b, set_a) if swap else (set_a, set_b)

    if method == "exact-lp":
        out = _exact_commutative_infimum(a, b, seminorm)
    else:
        try:
            pa, pb = _singleton_state(a), _singleton_state(b)
            if pa is not None and pb is not None:
                r = rho(seminorm, pa, pb, pool=pool)
                out = DistanceResult(
                    value=r.value, lower=r.lower, upper=r.upper,
                    method="exact-lp" if r.method == "exact-lp" else "sampled",
                    witnesses=(pa, pb),
                    iterations=r.iterations,
                )
            else:
                rng = np.random.default_rng(seed)
                engine = _SampledEngine(a, b, seminorm, rng, opts, pool)
                out = engine.infimum()
        except EmptySetError:
            out = DistanceResult(value=math.inf, lower=math.inf, upper=math.inf,
                                 method="sampled", empty=True)
    if swap and out.witnesses is not None:
        out = replace(out, witnesses=(out.witnesses[1], out.witnesses[0]))
    return out


def _enumerate_commutative_extremes(s: StateSet) -> list[int] | None:
    reduced = _reduce_commutative_to_face(s)
    if reduced is None:
        return None
    return [i for i, b in enumerate(reduced.projection.blocks) if b[0, 0].real > 0.5]


def _directed_exact(points: list[int], target: StateSet, seminorm: PolyhedralSeminorm):
    n = seminorm.algebra.num_blocks
    best = (-math.inf, None, None)
    iters = 0
    for x in points:
        pin = np.zeros(n)
        pin[x] = 1.0
        face_x = face_from_projection(Projection.from_indicator(seminorm.algebra, [x]))
        res = _exact_commutative_infimum(face_x, target, seminorm, pin_a=pin)
        iters += res.iterations
        if res.value > best[0]:
            best = (res.value, x, res.witnesses)
    return best[0], best[1], best[2], iters


def _directed_sampled(
    source: StateSet,
    target: StateSet,
    seminorm: Seminorm,
    rng: np.random.Generator,
    opts: SearchOptions,
    pool: CutPool,
    seed_states: tuple[State, ...],
) -> tuple[float, float, int]:
    """sup over sampled boundary states of the inner infimum.

    Returns (value estimate, certified lower bound, iterations).  The
    estimate only bounds the true supremum from below.
    """
    target_point = _singleton_state(target)
    target_vec = target_point.to_vec() if target_point is not None else None
    engine = None
    if target_vec is None:
        engine = _SampledEngine(source, target, seminorm, rng, opts.light(), pool)

    iters = 0

    def inner(vec: np.ndarray) -> tuple[float, float]:
        nonlocal iters
        if target_vec is not None:
            res = rho_vec(seminorm, vec - target_vec, pool=pool)
            iters += 1
            return res.value, res.lower
        out = engine.infimum(pin_a=vec)
        iters += out.iterations
        return out.value, out.lower

    samples: list[np.ndarray] = [s.to_vec() for s in seed_states]
    source_point = _singleton_state(source)
    if source_point is not None:
        samples.append(source_point.to_vec())
        batches = [0]
    else:
        batches = [opts.batch_start * (2 ** i) for i in range(opts.max_doublings)]

    best_val, best_low = 0.0, 0.0

    def run(vec):
        nonlocal best_val, best_low
        val, low = inner(vec)
        if not math.isinf(val):
            best_val = max(best_val, val)
            best_low = max(best_low, low)

    for vec in samples:
        run(vec)
    source_geom = _geometry(source)
    for size in batches:
        prev = best_val
        if size:
            if source.kind == "face":
                batch = sample_extreme_states(source, size, int(rng.integers(2 ** 31)))
                vecs = [s.to_vec() for s in batch]
            else:
                vecs = source_geom.sample_members(rng, size)
                if not vecs:
                    # No diagonal structure: project sampled pure states.
                    full = face_from_projection(Projection(
                        source.algebra,
                        tuple(np.eye(n, dtype=complex) for n in source.algebra.blocks),
                    ))
                    for s in sample_extreme_states(full, size, int(rng.integers(2 ** 31))):
                        vec, resid = source_geom.project(s.to_vec())
                        if resid <= FEAS_TOL:
                            vecs.append(vec)
            for vec in vecs:
                run(vec)
        if best_val <= 0.0:
            continue
        if abs(best_val - prev) < opts.plateau_rel * max(best_val, 1e-12):
            break
    return best_val, best_low, iters


def hausdorff_distance(
    set_a: StateSet,
    set_b: StateSet,
    seminorm: Seminorm,
    *,
    seed: int = 0,
    options: SearchOptions | None = None,
    pool: CutPool | None = None,
    seed_states: tuple[State, ...] = (),
) -> DistanceResult:
    """Two-sided Hausdorff distance between nonempty sets of states.

    Commutative faces go through exact enumeration of the point-mass
    extremes with one LP each; everything else uses sampled outer suprema
    whose value is certified only from below (``upper`` is +inf there).
    """
    _check_same_algebra(set_a, set_b, seminorm)
    opts = options or SearchOptions()
    rng = np.random.default_rng(seed)

    if _sets_equal(set_a, set_b):
        method = "exact-lp" if _is_exact_path(set_a, set_b, seminorm) else "sampled"
        return _zero_result(set_a, method)

    swap = _set_key(set_a) > _set_key(set_b)
    a, b = (set_b, set_a) if swap else (set_a, set_b)

    # Emptiness is an error for Hausdorff distances.
    for s in (a, b):
        if s.kind == "moment":
            if s.algebra.is_commutative:
                if not _commutative_set_feasible(s, s.algebra.num_blocks):
                    raise EmptySetError("Hausdorff distance to an empty set is undefined")
            else:
                _MomentGeometry(s).feasible_point(opts.repair_rounds)

    if _is_exact_path(a, b, seminorm):
        pts_a = _enumerate_commutative_extremes(a)
        pts_b = _enumerate_commutative_extremes(b)
        if pts_a is not None and pts_b is not None:
            v_ab, _, wit_ab, it1 = _directed_exact(pts_a, b, seminorm)
            v_ba, _, wit_ba, it2 = _directed_exact(pts_b, a, seminorm)
            if v_ab >= v_ba:
                value, witnesses = v_ab, wit_ab
            else:
                value, witnesses = v_ba, (wit_ba[1], wit_ba[0]) if wit_ba else None
            out = DistanceResult(value=value, lower=value, upper=value,
                                 method="exact-lp", witnesses=witnesses,
                                 iterations=it1 + it2)
            if swap and out.witnesses is not None:
                out = replace(out, witnesses=(out.witnesses[1], out.witnesses[0]))
            return out

    pa, pb = _singleton_state(a), _singleton_state(b)
    if pa is not None and pb is not None:
        r = rho(seminorm, pa, pb, pool=pool)
        out = DistanceResult(value=r.value, lower=r.lower, upper=r.upper,
                             method="sampled",
                             witnesses=(pa, pb),
                             iterations=r.iterations)
        if swap and out.witnesses is not None:
            out = replace(out, witnesses=(out.witnesses[1], out.witnesses[0]))
        return out

    pool = pool if pool is not None else CutPool()
    v1, low1, it1 = _directed_sampled(a, b, seminorm, rng, opts, pool, seed_states)
    v2, low2, it2 = _directed_sampled(b, a, seminorm, rng, opts, pool, seed_states)
    return DistanceResult(
        value=max(v1, v2), lower=max(low1, low2), upper=math.inf,
        method="sampled", iterations=it1 + it2,
    )
