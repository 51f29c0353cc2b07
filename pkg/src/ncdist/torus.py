"""Finite-truncation laboratory for quantum-torus distance experiments.

At rational angle theta = p/q the two unitary generators are realized by
clock and shift matrices: ``u -> w S`` and ``v -> z C`` per
representation point (w, z) on the unit circle, with ``C`` the diagonal
of q-th roots of unity and ``S`` the cyclic shift, so that
``uv = exp(2 pi i p/q) vu`` holds to machine precision.  Multiple
representation points are direct-summed: a single irreducible block
collapses every sub-circle to one state, so higher-dimensional
sub-circle sets require several points.  That truncation choice is the
central modeling decision of this module and is echoed in all outputs.

Elements carry Fourier coefficients on centered exponents
m, n in {-M..M}; the derivation seminorm weights 2 pi i m need this
canonical lift of Z_q to Z, and aliasing of the realization map is the
reason the seminorm lives on coefficients rather than on realized
matrices.  Realization sums run over nonzero coefficients in a fixed
lexicographic order, so enlarging the cutoff box around fixed
coefficients reproduces bitwise-identical matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraElement, FiniteAlgebra, Projection, State, StateSet, \
    commutative_algebra, face_from_character, face_from_projection
from .classical import FiniteMetricSpace, hausdorff as classical_hausdorff, \
    infimum as classical_infimum
from .errors import EmptySetError, InvalidInputError
from .hyper import DistanceResult, SearchOptions, hausdorff_distance, infimum_distance
from .qmetric import CutPool, DerivationSeminorm, Seminorm, from_metric, kernel_check

__all__ = [
    "FuzzyTorusConfig",
    "TorusBundle",
    "TorusElement",
    "SubCircle",
    "TorusDistanceTable",
    "BaselineReport",
    "build",
    "torus_seminorm",
    "subcircle",
    "subcircle_distance_table",
    "classical_baseline",
]


@dataclass(frozen=True)
class FuzzyTorusConfig:
    """Truncation parameters: angle p/q, representation points, Fourier cutoff."""

    q: int
    p: int
    points: tuple
    cutoff: int

    def __post_init__(self):
        if self.q < 1:
            raise InvalidInputError("q must be a positive integer")
        if math.gcd(self.p, self.q) != 1 and not (self.q == 1):
            raise InvalidInputError("p and q must be coprime")
        if self.cutoff < 1:
            raise InvalidInputError("Fourier cutoff must be at least 1")
        pts = []
        for w, z in self.points:
            w, z = complex(w), complex(z)
            if abs(abs(w) - 1.0) > 1e-9 or abs(abs(z) - 1.0) > 1e-9:
                raise InvalidInputError("representation points must lie on the unit circle")
            pts.append((w / abs(w), z / abs(z)))
        if not pts:
            raise InvalidInputError("need at least one representation point")
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if abs(pts[i][0] - pts[j][0]) < 1e-12 and abs(pts[i][1] - pts[j][1]) < 1e-12:
                    raise InvalidInputError("representation points must be distinct")
        object.__setattr__(self, "points", tuple(pts))

    @property
    def theta(self) -> float:
        return (self.p % self.q) / self.q if self.q > 1 else 0.0

    @property
    def phase(self) -> complex:
        return np.exp(2j * np.pi * self.p / self.q)


def _clock(q: int, p: int) -> np.ndarray:
    return np.diag(np.exp(2j * np.pi * p * np.arange(q) / q))


def _shift(q: int) -> np.ndarray:
    s = np.zeros((q, q), dtype=complex)
    for j in range(q):
        s[j, (j + 1) % q] = 1.0
    return s


def _shift_power(q: int, m: int) -> np.ndarray:
    s = np.zeros((q, q), dtype=complex)
    for k in range(q):
        s[(k - m) % q, k] = 1.0
    return s


def _clock_power(q: int, p: int, n: int) -> np.ndarray:
    return np.diag(np.exp(2j * np.pi * p * n * np.arange(q) / q))


def _box(cutoff: int) -> list[tuple[int, int]]:
    return [(m, n) for m in range(-cutoff, cutoff + 1)
            for n in range(-cutoff, cutoff + 1)]


@dataclass(frozen=True)
class TorusBundle:
    """Realized clock/shift data for one configuration."""

    config: FuzzyTorusConfig
    algebra: FiniteAlgebra
    u: AlgebraElement
    v: AlgebraElement

    def __post_init__(self):
        object.__setattr__(self, "_cache", {})

    def monomial(self, m: int, n: int) -> list[np.ndarray]:
        """Realized u^m v^n, one matrix per block."""
        cache = self._cache.setdefault("monomials", {})
        if (m, n) not in cache:
            cfg = self.config
            blocks = []
            for w, z in cfg.points:
                blocks.append((w ** m) * (z ** n)
                              * (_shift_power(cfg.q, m) @ _clock_power(cfg.q, cfg.p, n)))
            cache[(m, n)] = blocks
        return cache[(m, n)]

    def realize_coeffs(self, coeffs: np.ndarray) -> AlgebraElement:
        """Realize a coefficient array, summing nonzero terms in a fixed
        lexicographic order (stable under cutoff growth)."""
        cfg = self.config
        m0 = cfg.cutoff
        blocks = [np.zeros((cfg.q, cfg.q), dtype=complex) for _ in cfg.points]
        for m, n in _box(m0):
            alpha = coeffs[m + m0, n + m0]
            if alpha == 0:
                continue
            mono = self.monomial(m, n)
            for b in range(len(blocks)):
                blocks[b] = blocks[b] + alpha * mono[b]
        return AlgebraElement(self.algebra, tuple(blocks))

    def hermitian_basis(self) -> list[np.ndarray]:
        """Coefficient arrays of a real basis of the Hermitian elements.

        Order: the unit (0,0), then for each centered exponent pair
        (m, n) > (0, 0) the cosine- and sine-type combinations of
        ``u^m v^n`` and its adjoint.
        """
        cache = self._cache
        if "basis" not in cache:
            m0 = self.config.cutoff
            lam = self.config.phase
            size = 2 * m0 + 1
            out = []
            unit = np.zeros((size, size), dtype=complex)
            unit[m0, m0] = 1.0
            out.append(unit)
            for m, n in _box(m0):
                if not (m > 0 or (m == 0 and n > 0)):
                    continue
                cos = np.zeros((size, size), dtype=complex)
                cos[m + m0, n + m0] = 0.5
                cos[-m + m0, -n + m0] = 0.5 * lam ** (-m * n)
                sin = np.zeros((size, size), dtype=complex)
                sin[m + m0, n + m0] = -0.5j
                sin[-m + m0, -n + m0] = 0.5j * lam ** (-m * n)
                out.append(cos)
                out.append(sin)
            cache["basis"] = out
        return cache["basis"]


def build(config: FuzzyTorusConfig) -> TorusBundle:
    """Realize the configuration and verify the commutation identity."""
    q = config.q
    blocks = tuple(q for _ in config.points)
    algebra = FiniteAlgebra(blocks=blocks)
    c = _clock(q, config.p)
    s = _shift(q)
    u = AlgebraElement(algebra, tuple(w * s for w, _ in config.points))
    v = AlgebraElement(algebra, tuple(z * c for _, z in config.points))
    lam = config.phase
    for ub, vb in zip(u.blocks, v.blocks):
        resid = np.max(np.abs(ub @ vb - lam * (vb @ ub)))
        if resid > 1e-12:
            raise InvalidInputError(f"commutation residual {resid:.3e} exceeds 1e-12")
    return TorusBundle(config=config, algebra=algebra, u=u, v=v)


@dataclass(frozen=True)
class TorusElement:
    """Fourier coefficients on the centered cutoff box, plus realization."""

    bundle: TorusBundle
    coeffs: np.ndarray

    def __post_init__(self):
        m0 = self.bundle.config.cutoff
        arr = np.asarray(self.coeffs, dtype=complex)
        if arr.shape != (2 * m0 + 1, 2 * m0 + 1):
            raise InvalidInputError("coefficient array does not match the cutoff box")
        object.__setattr__(self, "coeffs", arr)

    def realize(self) -> AlgebraElement:
        return self.bundle.realize_coeffs(self.coeffs)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        """Coefficient-level Hermiticity: alpha_{m,n} agrees with the
        adjoint coefficient conj(alpha_{-m,-n}) times the commutation phase."""
        cfg = self.bundle.config
        m0 = cfg.cutoff
        lam = cfg.phase
        for m, n in _box(m0):
            lhs = self.coeffs[m + m0, n + m0]
            rhs = np.conj(self.coeffs[-m + m0, -n + m0]) * lam ** (-m * n)
            if abs(lhs - rhs) > tol:
                return False
        return True

    def coeff_vec(self) -> np.ndarray:
        """Real coordinates in the Hermitian coefficient basis."""
        if not self.is_hermitian(1e-9):
            raise InvalidInputError("coefficient array is not Hermitian")
        cfg = self.bundle.config
        m0 = cfg.cutoff
        out = [float(self.coeffs[m0, m0].real)]
        for m, n in _box(m0):
            if not (m > 0 or (m == 0 and n > 0)):
                continue
            alpha = self.coeffs[m + m0, n + m0]
            out.append(2.0 * alpha.real)
            out.append(-2.0 * alpha.imag)
        return np.asarray(out)

    @staticmethod
    def from_coeff_vec(bundle: TorusBundle, vec: np.ndarray) -> "TorusElement":
        basis = bundle.hermitian_basis()
        vec = np.asarray(vec, dtype=float)
        if vec.shape[0] != len(basis):
            raise InvalidInputError("coordinate vector does not match the basis")
        coeffs = sum(x * b for x, b in zip(vec, basis))
        return TorusElement(bundle=bundle, coeffs=coeffs)

    @staticmethod
    def from_monomial(bundle: TorusBundle, m: int, n: int,
                      alpha: complex = 1.0) -> "TorusElement":
        m0 = bundle.config.cutoff
        if abs(m) > m0 or abs(n) > m0:
            raise InvalidInputError("monomial exponent outside the cutoff box")
        coeffs = np.zeros((2 * m0 + 1, 2 * m0 + 1), dtype=complex)
        coeffs[m + m0, n + m0] = alpha
        return TorusElement(bundle=bundle, coeffs=coeffs)


def torus_seminorm(bundle: TorusBundle, combine: str = "max",
                   check_kernel: bool = True) -> DerivationSeminorm:
    """Derivation seminorm from the two canonical torus derivations.

    delta_1 multiplies the (m, n) coefficient by 2 pi i m and delta_2 by
    2 pi i n; both act on the Fourier-truncated coefficient domain and
    are realized before taking operator norms.  The kernel on the
    truncated span must be the constants; degenerate representation
    point sets fail that check and are rejected.
    """
    cfg = bundle.config
    m0 = cfg.cutoff
    basis = bundle.hermitian_basis()
    dim = len(basis)
    d_sa = bundle.algebra.dim_sa
    eval_map = np.empty((d_sa, dim))
    exps_m = np.arange(-m0, m0 + 1).reshape(-1, 1)
    exps_n = np.arange(-m0, m0 + 1).reshape(1, -1)
    images_1 = [np.empty((dim, cfg.q, cfg.q), dtype=complex) for _ in cfg.points]
    images_2 = [np.empty((dim, cfg.q, cfg.q), dtype=complex) for _ in cfg.points]
    for r, b in enumerate(basis):
        eval_map[:, r] = bundle.realize_coeffs(b).to_vec()
        d1 = bundle.realize_coeffs(2j * np.pi * exps_m * b)
        d2 = bundle.realize_coeffs(2j * np.pi * exps_n * b)
        for blk in range(len(cfg.points)):
            images_1[blk][r] = d1.blocks[blk]
            images_2[blk][r] = d2.blocks[blk]
    seminorm = DerivationSeminorm(
        algebra=bundle.algebra, dim=dim, eval_map=eval_map,
        images=(tuple(images_1), tuple(images_2)), combine=combine,
    )
    if check_kernel:
        ok, witness = kernel_check(seminorm)
        if not ok:
            raise InvalidInputError(
                "torus seminorm kernel is larger than the constants "
                "(degenerate representation point set)"
            )
    return seminorm


def v_spectrum(bundle: TorusBundle, tol: float = 1e-9) -> list[complex]:
    """Distinct realized eigenvalues of v across all blocks."""
    values: list[complex] = []
    for blk in bundle.v.blocks:
        for lam in np.diagonal(blk):
            if all(abs(lam - mu) > tol for mu in values):
                values.append(complex(lam))
    return values


@dataclass(frozen=True)
class SubCircle:
    """A v-sub-circle moment set with its feasibility verdict."""

    z: complex
    state_set: StateSet
    feasible: bool


def subcircle(z: complex, bundle: TorusBundle) -> SubCircle:
    """States restricting to the point evaluation at z on the v-subalgebra.

    Moment constraints pin mu(v^k) = z^k for k = 1..K where K separates
    the distinct realized eigenvalues of v (K = q - 1 for a single
    representation point or shared z-spectra).  The set is nonempty iff
    z lies in the realized spectrum of v; infeasible targets are
    reported, and infimum distances then follow the +infinity
    convention for empty sets.
    """
    z = complex(z)
    if abs(abs(z) - 1.0) > 1e-12:
        raise InvalidInputError("sub-circle target must have unit modulus")
    spec = v_spectrum(bundle)
    k_max = len(spec) - 1
    feasible = any(abs(z - lam) <= 1e-9 for lam in spec)
    constraints, targets = [], []
    vk = bundle.algebra.identity()
    for k in range(1, k_max + 1):
        vk = vk @ bundle.v
        constraints.append(vk)
        targets.append(z ** k)
    if not constraints:
        # Single distinct eigenvalue: the v-subalgebra is scalar and the
        # constraint set is vacuous (the whole state space).
        state_set = StateSet(algebra=bundle.algebra, kind="moment",
                             constraints=(), targets=())
    else:
        state_set = face_from_character(constraints, targets)
    return SubCircle(z=z, state_set=state_set, feasible=feasible)


@dataclass(frozen=True)
class TableEntry:
    z: complex
    z2: complex
    infimum: DistanceResult
    hausdorff: DistanceResult


@dataclass(frozen=True)
class TorusDistanceTable:
    """Symmetric distance table over the feasible sub-circle targets."""

    config: FuzzyTorusConfig
    zs: tuple
    infeasible: tuple
    entries: tuple  # TableEntry for i <= j over feasible zs
    seed: int

    def lookup(self, i: int, j: int) -> TableEntry:
        i, j = (i, j) if i <= j else (j, i)
        for e in self.entries:
            if abs(e.z - self.zs[i]) < 1e-12 and abs(e.z2 - self.zs[j]) < 1e-12:
                return e
        raise KeyError((i, j))

    def matrices(self) -> tuple[np.ndarray, np.ndarray]:
        """(I, H) value matrices, symmetric with zero diagonal."""
        n = len(self.zs)
        mi = np.zeros((n, n))
        mh = np.zeros((n, n))
        for i in range(n):
            for j in range(i, n):
                e = self.lookup(i, j)
                mi[i, j] = mi[j, i] = e.infimum.value
                mh[i, j] = mh[j, i] = e.hausdorff.value
        return mi, mh

    def rows(self) -> list[dict]:
        """Upper-triangle rows in the table CSV layout."""
        out = []
        n = len(self.zs)
        for i in range(n):
            for j in range(i + 1, n):
                e = self.lookup(i, j)
                out.append({
                    "z": e.z, "z2": e.z2,
                    "I_value": e.infimum.value, "I_lower": e.infimum.lower,
                    "I_upper": e.infimum.upper,
                    "H_value": e.hausdorff.value, "H_lower": e.hausdorff.lower,
                    "H_upper": e.hausdorff.upper,
                    "method": e.hausdorff.method,
                })
        return out


def subcircle_distance_table(
    zs,
    bundle: TorusBundle,
    seminorm: Seminorm | None = None,
    *,
    seed: int = 0,
    options: SearchOptions | None = None,
) -> TorusDistanceTable:
    """Infimum and Hausdorff distances between all pairs of sub-circles.

    Entries are computed once per unordered pair (the table is symmetric
    by construction, with an exact zero diagonal); infeasible targets
    are excluded from the table and listed separately.
    """
    seminorm = seminorm if seminorm is not None else torus_seminorm(bundle)
    circles = [subcircle(z, bundle) for z in zs]
    feasible = [c for c in circles if c.feasible]
    infeasible = [c.z for c in circles if not c.feasible]
    pool = CutPool()
    entries = []
    for i in range(len(feasible)):
        for j in range(i, len(feasible)):
            ci, cj = feasible[i], feasible[j]
            if i == j:
                res_i = infimum_distance(ci.state_set, ci.state_set, seminorm,
                                         seed=seed, options=options, pool=pool)
                res_h = hausdorff_distance(ci.state_set, ci.state_set, seminorm,
                                           seed=seed, options=options, pool=pool)
            else:
                res_i = infimum_distance(ci.state_set, cj.state_set, seminorm,
                                         seed=seed, options=options, pool=pool)
                seeds = res_i.witnesses if res_i.witnesses is not None else ()
                res_h = hausdorff_distance(ci.state_set, cj.state_set, seminorm,
                                           seed=seed, options=options, pool=pool,
                                           seed_states=tuple(seeds))
            entries.append(TableEntry(z=ci.z, z2=cj.z, infimum=res_i, hausdorff=res_h))
    return TorusDistanceTable(
        config=bundle.config,
        zs=tuple(c.z for c in feasible),
        infeasible=tuple(infeasible),
        entries=tuple(entries),
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Classical baseline (theta = 0 grid torus)
# ---------------------------------------------------------------------------

def _arc(i: int, j: int, n: int) -> float:
    d = abs(i - j) % n
    return 2.0 * np.pi * min(d, n - d) / n


def grid_torus_space(n: int) -> FiniteMetricSpace:
    """n x n grid on the torus with the taxicab product of arc metrics."""
    size = n * n
    d = np.zeros((size, size))
    arcs = np.array([[_arc(i, j, n) for j in range(n)] for i in range(n)])
    for i1 in range(n):
        for j1 in range(n):
            row = (arcs[i1][:, None] + arcs[j1][None, :]).ravel()
            d[i1 * n + j1] = row
    return FiniteMetricSpace(d=d)


@dataclass(frozen=True)
class BaselinePair:
    j: int
    j2: int
    circle_distance: float
    infimum_classical: float
    infimum_states: float
    hausdorff_classical: float
    hausdorff_states: float

    @property
    def max_deviation(self) -> float:
        return max(
            abs(self.infimum_classical - self.infimum_states),
            abs(self.hausdorff_classical - self.hausdorff_states),
        )


@dataclass(frozen=True)
class BaselineReport:
    grid: int
    grid_step: float
    pairs: tuple
    continuity_modulus_classical: float
    continuity_modulus_states: float

    @property
    def max_deviation(self) -> float:
        return max(p.max_deviation for p in self.pairs)


def classical_baseline(n: int, pair_offsets=(1, None)) -> BaselineReport:
    """Grid-torus check of the sub-circle distances at theta = 0.

    Builds the n x n commutative grid with the product arc metric,
    compares classical I and H between sub-circles {(w, z_j)} and
    {(w, z_j')} (both equal the circle distance between the z's) with
    the state-space machinery on the corresponding faces, and evaluates
    the discrete continuity modulus: the largest Hausdorff distance
    between neighboring sub-circles, which equals the grid step.  The
    grid is translation invariant in z, so the state-side modulus is
    evaluated on one representative adjacent pair.
    """
    if n < 4:
        raise InvalidInputError("grid size must be at least 4")
    space = grid_torus_space(n)
    seminorm = from_metric(space)
    algebra = commutative_algebra(n * n)

    def column(j: int) -> list[int]:
        return [i * n + j for i in range(n)]

    def face(j: int) -> StateSet:
        return face_from_projection(Projection.from_indicator(algebra, column(j)))

    offsets = [n // 2 if off is None else off for off in pair_offsets]
    pairs = []
    for off in offsets:
        ka, kb = column(0), column(off % n)
        fa, fb = face(0), face(off % n)
        pairs.append(BaselinePair(
            j=0, j2=off % n,
            circle_distance=_arc(0, off % n, n),
            infimum_classical=classical_infimum(ka, kb, space),
            infimum_states=infimum_distance(fa, fb, seminorm).value,
            hausdorff_classical=classical_hausdorff(ka, kb, space),
            hausdorff_states=hausdorff_distance(fa, fb, seminorm).value,
        ))
    modulus_classical = max(
        classical_hausdorff(column(j), column((j + 1) % n), space) for j in range(n)
    )
    adjacent = next((p for p in pairs if (p.j2 - p.j) % n == 1), None)
    if adjacent is not None:
        modulus_states = adjacent.hausdorff_states
    else:
        modulus_states = hausdorff_distance(face(0), face(1), seminorm).value
    return BaselineReport(
        grid=n,
        grid_step=2.0 * np.pi / n,
        pairs=tuple(pairs),
        continuity_modulus_classical=modulus_classical,
        continuity_modulus_states=modulus_states,
    )
