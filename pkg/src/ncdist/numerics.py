"""Dense Hermitian linear algebra and LP solving used by every other module.

Three primitives live here: an eigendecomposition for Hermitian matrices,
a linear-program front end with primal and dual values (so callers can
always report a duality gap), and the Frobenius-nearest projection onto
the density matrices (PSD, trace one).  Complex Hermitian data is moved
in and out of real coordinate vectors by :func:`hermitian_to_vec` /
:func:`vec_to_hermitian`; the LP layer itself is purely real.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.optimize
import scipy.sparse

from .errors import InvalidInputError, NumericalFailureError

HERMITIAN_TOL = 1e-12
RECON_TOL = 1e-9
DUALITY_GAP_TOL = 1e-7
FEASIBILITY_TOL = 1e-8

__all__ = [
    "HERMITIAN_TOL",
    "DUALITY_GAP_TOL",
    "SpectralDecomposition",
    "LinearProgram",
    "LPSolution",
    "check_hermitian",
    "eigh",
    "solve_lp",
    "project_to_density",
    "simplex_projection",
    "hermitian_to_vec",
    "vec_to_hermitian",
    "hermitian_dim",
]


def check_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate conjugate symmetry and return the matrix as complex ndarray."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {h.shape}")
    dev = np.max(np.abs(h - h.conj().T)) if h.size else 0.0
    if dev > tol:
        raise InvalidInputError(f"matrix is not Hermitian (deviation {dev:.3e} > {tol:.1e})")
    return h


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and a unitary matrix of column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eigh(h: np.ndarray) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Rejects non-Hermitian input.  The returned decomposition satisfies
    ``V diag(w) V* == H`` and ``V* V == I`` to 1e-9.
    """
    h = check_hermitian(h)
    w, v = np.linalg.eigh(h)
    return SpectralDecomposition(eigenvalues=w, eigenvectors=v)


# ---------------------------------------------------------------------------
# Linear programming
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearProgram:
    """A real LP: optimize ``objective . x`` under equalities, inequalities
    and per-variable bounds.

    ``bounds`` entries are ``(low, high)`` with ``None`` for unbounded;
    variables are free by default.  Set ``maximize=True`` to maximize.
    """

    objective: np.ndarray
    a_eq: object = None
    b_eq: np.ndarray | None = None
    a_ub: object = None
    b_ub: np.ndarray | None = None
    bounds: object = None
    maximize: bool = False

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.objective, dtype=float))
        object.__setattr__(self, "objective", c)
        if self.a_eq is not None:
            b = np.atleast_1d(np.asarray(self.b_eq, dtype=float))
            if self.a_eq.shape[0] != b.shape[0]:
                raise InvalidInputError(
                    f"equality matrix has {self.a_eq.shape[0]} rows but rhs has {b.shape[0]}"
                )
            object.__setattr__(self, "b_eq", b)
        if self.a_ub is not None:
            b = np.atleast_1d(np.asarray(self.b_ub, dtype=float))
            if self.a_ub.shape[0] != b.shape[0]:
                raise InvalidInputError(
                    f"inequality matrix has {self.a_ub.shape[0]} rows but rhs has {b.shape[0]}"
                )
            object.__setattr__(self, "b_ub", b)
        # Normalize bounds to an (n, 2) array with +-inf for missing limits;
        # this keeps the solver front end from parsing tuples one by one.
        n = c.shape[0]
        if self.bounds is None:
            arr = np.column_stack([np.full(n, -np.inf), np.full(n, np.inf)])
        elif isinstance(self.bounds, np.ndarray):
            arr = np.asarray(self.bounds, dtype=float)
        else:
            arr = np.array(
                [[-np.inf if lo is None else lo, np.inf if hi is None else hi]
                 for lo, hi in self.bounds],
                dtype=float,
            )
        if arr.shape != (n, 2):
            raise InvalidInputError("need one (low, high) pair per variable")
        object.__setattr__(self, "bounds", arr)


@dataclass(frozen=True)
class LPSolution:
    """Solver outcome with primal/dual vectors and both objective values.

    ``status`` is one of ``"optimal"``, ``"infeasible"``, ``"unbounded"``.
    For optimal solutions the primal feasibility residual is <= 1e-8 and
    ``|objective_value - dual_objective_value| <= 1e-7`` (strong duality).
    """

    status: str
    primal: np.ndarray | None = None
    dual_eq: np.ndarray | None = None
    dual_ub: np.ndarray | None = None
    objective_value: float = np.nan
    dual_objective_value: float = np.nan
    iterations: int = 0
    residual: float = np.nan

    @property
    def duality_gap(self) -> float:
        return abs(self.objective_value - self.dual_objective_value)


def _dual_value(lp: LinearProgram, res) -> float:
    """Dual objective from HiGHS marginals, in the user's orientation."""
    val = 0.0
    if lp.a_eq is not None:
        val += float(np.dot(lp.b_eq, res.eqlin.marginals))
    if lp.a_ub is not None:
        val += float(np.dot(lp.b_ub, res.ineqlin.marginals))
    lo, hi = lp.bounds[:, 0], lp.bounds[:, 1]
    lo_m = np.asarray(res.lower.marginals)
    hi_m = np.asarray(res.upper.marginals)
    finite_lo = np.isfinite(lo)
    finite_hi = np.isfinite(hi)
    val += float(np.dot(lo[finite_lo], lo_m[finite_lo]))
    val += float(np.dot(hi[finite_hi], hi_m[finite_hi]))
    return -val if lp.maximize else val


def _primal_residual(lp: LinearProgram, x: np.ndarray) -> float:
    r = 0.0
    if lp.a_eq is not None:
        r = max(r, float(np.max(np.abs(lp.a_eq @ x - lp.b_eq))))
    if lp.a_ub is not None:
        viol = lp.a_ub @ x - lp.b_ub
        r = max(r, float(np.max(viol, initial=0.0)))
    lo, hi = lp.bounds[:, 0], lp.bounds[:, 1]
    r = max(r, float(np.max(lo - x, initial=0.0)))
    r = max(r, float(np.max(x - hi, initial=0.0)))
    return r


def solve_lp(lp: LinearProgram) -> LPSolution:
    """Solve an LP and report primal and dual objective values.

    Infeasible and unbounded problems come back as statuses, not
    exceptions; anything else the backend reports is raised as a
    :class:`NumericalFailureError`.
    """
    c = -lp.objective if lp.maximize else lp.objective
    res = scipy.optimize.linprog(
        c,
        A_eq=lp.a_eq,
        b_eq=lp.b_eq,
        A_ub=lp.a_ub,
        b_ub=lp.b_ub,
        bounds=lp.bounds,
        method="highs",
    )
    if res.status == 2:
        return LPSolution(status="infeasible", iterations=int(res.nit))
    if res.status == 3:
        return LPSolution(status="unbounded", iterations=int(res.nit))
    if res.status != 0:
        raise NumericalFailureError(f"LP solver failed: {res.message}")
    obj = float(res.fun)
    if lp.maximize:
        obj = -obj
    x = np.asarray(res.x)
    sign = -1.0 if lp.maximize else 1.0
    return LPSolution(
        status="optimal",
        primal=x,
        dual_eq=sign * np.asarray(res.eqlin.marginals) if lp.a_eq is not None else None,
        dual_ub=sign * np.asarray(res.ineqlin.marginals) if lp.a_ub is not None else None,
        objective_value=obj,
        dual_objective_value=_dual_value(lp, res),
        iterations=int(res.nit),
        residual=_primal_residual(lp, x),
    )


# ---------------------------------------------------------------------------
# Density projection
# ---------------------------------------------------------------------------

def simplex_projection(w: np.ndarray) -> np.ndarray:
    """Euclidean projection of a real vector onto the probability simplex."""
    w = np.asarray(w, dtype=float)
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, len(w) + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(w - theta, 0.0)


def project_to_density(h: np.ndarray) -> np.ndarray:
    """Frobenius-nearest PSD trace-one matrix to a Hermitian matrix.

    Diagonalize, project the spectrum onto the probability simplex,
    reconstruct.  Idempotent: density matrices are fixed points.
    """
    dec = eigh(h)
    w = simplex_projection(dec.eigenvalues)
    v = dec.eigenvectors
    out = (v * w) @ v.conj().T
    return 0.5 * (out + out.conj().T)


# ---------------------------------------------------------------------------
# Realification of Hermitian matrices
# ---------------------------------------------------------------------------

def hermitian_dim(n: int) -> int:
    """Real dimension of the Hermitian n x n matrices."""
    return n * n


def hermitian_to_vec(h: np.ndarray) -> np.ndarray:
    """Isometric real coordinates of a Hermitian matrix.

    Layout: the n diagonal entries, then for each pair i<j (row-major)
    ``sqrt(2)*Re`` and ``sqrt(2)*Im`` of the upper-triangular entry.  The
    trace inner product of two Hermitian matrices equals the Euclidean
    dot product of their coordinate vectors.
    """
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    iu = np.triu_indices(n, k=1)
    upper = h[iu]
    return np.concatenate([
        h.diagonal().real,
        np.sqrt(2.0) * upper.real,
        np.sqrt(2.0) * upper.imag,
    ])


def vec_to_hermitian(v: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`hermitian_to_vec`."""
    v = np.asarray(v, dtype=float)
    if v.shape[0] != n * n:
        raise InvalidInputError(f"vector length {v.shape[0]} does not match dim {n}")
    m = n * (n - 1) // 2
    out = np.zeros((n, n), dtype=complex)
    out[np.diag_indices(n)] = v[:n]
    iu = np.triu_indices(n, k=1)
    upper = (v[n:n + m] + 1j * v[n + m:]) / np.sqrt(2.0)
    out[iu] = upper
    out[(iu[1], iu[0])] = upper.conj()
    return out
