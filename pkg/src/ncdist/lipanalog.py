"""Seminorm analogs recovered from the state-space metric.

``l1`` is the supremum of |mu(a) - nu(a)| / rho_L(mu, nu) over state
pairs; ``l2`` replaces state pairs by spectral-level faces of a and
their infimum distances.  The chain l2 <= l1 <= L holds for any
seminorm-induced metric, with equality throughout in the commutative
metric-space case; ``chain_check`` verifies this at the bound level.
``subadditivity_probe`` searches commuting pairs for failures of
subadditivity or the Leibniz-style inequality of l2 and reports the
instances verbatim (it provides evidence, not answers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    AlgebraElement,
    FiniteAlgebra,
    Projection,
    State,
    StateSet,
    face_from_projection,
    sample_extreme_states,
)
from .errors import InvalidInputError
from .hyper import DistanceResult, infimum_distance
from .numerics import LinearProgram, solve_lp
from .qmetric import (
    CutPool,
    DerivationSeminorm,
    PolyhedralSeminorm,
    Seminorm,
    kernel_check,
    rho,
    seminorm_eval,
)

LEVEL_TOL = 1e-8
CHAIN_TOL = 1e-6

__all__ = [
    "SpectralFaces",
    "BoundedValue",
    "ChainReport",
    "spectral_faces",
    "l1",
    "l2",
    "chain_check",
    "subadditivity_probe",
]


@dataclass(frozen=True)
class SpectralFaces:
    """Distinct eigenvalues of a Hermitian element and their level faces."""

    levels: tuple[float, ...]
    projections: tuple[Projection, ...]
    faces: tuple[StateSet, ...]


def spectral_faces(a: AlgebraElement) -> SpectralFaces:
    """Eigenvalue clusters (absolute tolerance 1e-8) and the attached faces.

    Eigenvalues are collected across all blocks, so one level face may
    span several blocks.  The eigenprojections sum to the identity.
    """
    if not a.is_hermitian(1e-9):
        raise InvalidInputError("spectral faces need a Hermitian element")
    algebra = a.algebra
    entries = []  # (value, block, vector)
    for b, blk in enumerate(a.blocks):
        w, v = np.linalg.eigh(0.5 * (blk + blk.conj().T))
        for i in range(w.shape[0]):
            entries.append((float(w[i]), b, v[:, i]))
    entries.sort(key=lambda t: t[0])
    clusters: list[list] = []
    for val, b, vec in entries:
        if clusters and val - clusters[-1][-1][0] <= LEVEL_TOL:
            clusters[-1].append((val, b, vec))
        else:
            clusters.append([(val, b, vec)])
    levels, projections, faces = [], [], []
    for cluster in clusters:
        levels.append(float(np.mean([c[0] for c in cluster])))
        blocks = [np.zeros((n, n), dtype=complex) for n in algebra.blocks]
        for _, b, vec in cluster:
            blocks[b] = blocks[b] + np.outer(vec, vec.conj())
        proj_blocks = []
        for m in blocks:
            m = 0.5 * (m + m.conj().T)
            w, v = np.linalg.eigh(m)
            w = np.where(w > 0.5, 1.0, 0.0)
            proj_blocks.append((v * w) @ v.conj().T)
        p = Projection(algebra, tuple(proj_blocks))
        projections.append(p)
        faces.append(face_from_projection(p))
    return SpectralFaces(levels=tuple(levels), projections=tuple(projections),
                         faces=tuple(faces))


@dataclass(frozen=True)
class BoundedValue:
    """A scalar result with a certified bracket."""

    value: float
    lower: float
    upper: float
    method: str
    detail: dict = field(default_factory=dict)

    @property
    def gap(self) -> float:
        if math.isinf(self.value):
            return 0.0
        return self.upper - self.lower


def _l1_polyhedral(a: AlgebraElement, L: PolyhedralSeminorm) -> BoundedValue:
    """Exact LP for the state-pair ratio supremum.

    The ratio is scale invariant, so the supremum over state differences
    equals the supremum over the whole traceless cone: maximize
    ``sum t_k <h_k, a>`` over decomposition weights with
    ``sum c_k |t_k| <= 1``.
    """
    g = L.gen_matrix
    obj = np.asarray(g @ a.to_vec()).ravel()
    k = obj.shape[0]
    if k == 0:
        return BoundedValue(value=0.0, lower=0.0, upper=0.0, method="exact-lp")
    res = solve_lp(LinearProgram(
        objective=np.concatenate([obj, -obj]),
        a_ub=np.concatenate([L.scales, L.scales]).reshape(1, -1),
        b_ub=np.array([1.0]),
        bounds=[(0, None)] * (2 * k),
        maximize=True,
    ))
    v = res.objective_value
    return BoundedValue(value=v, lower=v, upper=v, method="exact-lp",
                        detail={"iterations": res.iterations})


def _l1_sampled(a: AlgebraElement, L: Seminorm, trials: int, seed: int,
                pool: CutPool | None) -> BoundedValue:
    """Pure-state pair sampling with local refinement; L(a) rides along as
    the companion upper bound from the chain inequality."""
    algebra = a.algebra
    full = face_from_projection(Projection(
        algebra, tuple(np.eye(n, dtype=complex) for n in algebra.blocks)))
    states = sample_extreme_states(full, trials, seed)
    pool = pool if pool is not None else CutPool()
    best = 0.0
    best_pair = None
    for i in range(0, len(states) - 1, 2):
        mu, nu = states[i], states[i + 1]
        r = rho(L, mu, nu, pool=pool)
        if r.is_infinite or r.value <= 1e-12:
            continue
        ratio = abs(mu.expect(a) - nu.expect(a)) / r.value
        if ratio > best:
            best = ratio
            best_pair = (mu, nu)
    rng = np.random.default_rng(seed + 1)
    if best_pair is not None:
        for scale in (0.3, 0.1, 0.03):
            for _ in range(8):
                blocks = []
                for m in best_pair[1].blocks:
                    n = m.shape[0]
                    noise = scale * (rng.standard_normal((n, n))
                                     + 1j * rng.standard_normal((n, n)))
                    blocks.append(m + noise @ noise.conj().T * 0.1 + 0.5 * (noise + noise.conj().T) * 0.1)
                try:
                    cand = _nearest_state(algebra, blocks)
                except InvalidInputError:
                    continue
                r = rho(L, best_pair[0], cand, pool=pool)
                if r.is_infinite or r.value <= 1e-12:
                    continue
                ratio = abs(best_pair[0].expect(a) - cand.expect(a)) / r.value
                if ratio > best:
                    best = ratio
                    best_pair = (best_pair[0], cand)
    upper = seminorm_eval(L, a)
    return BoundedValue(value=best, lower=best, upper=max(upper, best),
                        method="sampled")


def _nearest_state(algebra: FiniteAlgebra, blocks) -> State:
    from .numerics import hermitian_to_vec, simplex_projection

    decs = [np.linalg.eigh(0.5 * (np.asarray(b) + np.asarray(b).conj().T)) for b in blocks]
    spectra = np.concatenate([w for w, _ in decs])
    proj = simplex_projection(spectra)
    out, pos = [], 0
    for (w, v), n in zip(decs, algebra.blocks):
        d = proj[pos:pos + n]
        pos += n
        m = (v * d) @ v.conj().T
        out.append(0.5 * (m + m.conj().T))
    return State(algebra, tuple(out))


def l1(a: AlgebraElement, L: Seminorm, *, trials: int = 64, seed: int = 0,
       pool: CutPool | None = None) -> BoundedValue:
    """State-pair ratio seminorm: sup |mu(a) - nu(a)| / rho_L(mu, nu).

    Exact LP for polyhedral seminorms; sampled lower bound (with L(a) as
    the companion upper bound) for derivation seminorms.
    """
    if not a.is_hermitian(1e-9):
        raise InvalidInputError("l1 takes Hermitian elements")
    if isinstance(L, PolyhedralSeminorm):
        return _l1_polyhedral(a, L)
    if not L.is_ambient():
        raise InvalidInputError("l1 needs a seminorm whose domain is the algebra")
    return _l1_sampled(a, L, trials, seed, pool)


def l2(a: AlgebraElement, L: Seminorm, *, seed: int = 0,
       pool: CutPool | None = None) -> BoundedValue:
    """Level-face seminorm: sup over eigenvalue pairs of the gap divided by
    the infimum distance of the corresponding spectral faces.

    A zero infimum distance between distinct levels yields +infinity,
    which is a reportable outcome, not an error.
    """
    if not a.is_hermitian(1e-9):
        raise InvalidInputError("l2 takes Hermitian elements")
    sf = spectral_faces(a)
    m = len(sf.levels)
    if m < 2:
        return BoundedValue(value=0.0, lower=0.0, upper=0.0, method="exact-lp")
    pool = pool if pool is not None else CutPool()
    value = lower = 0.0
    upper = 0.0
    methods = set()
    infinite_pairs = []
    details = []
    for i in range(m):
        for j in range(i + 1, m):
            gap = sf.levels[j] - sf.levels[i]
            res = infimum_distance(sf.faces[j], sf.faces[i], L, seed=seed, pool=pool)
            methods.add(res.method)
            details.append({"levels": (sf.levels[i], sf.levels[j]),
                            "infimum": res.value, "method": res.method})
            if res.value <= 1e-12:
                infinite_pairs.append((sf.levels[i], sf.levels[j]))
                value = math.inf
                upper = math.inf
                continue
            value = max(value, gap / res.value)
            lower = max(lower, gap / res.upper if res.upper > 0 else math.inf)
            upper = max(upper, gap / res.lower if res.lower > 0 else math.inf)
    method = "exact-lp" if methods <= {"exact-lp"} else "sampled"
    if math.isinf(value):
        lower = value
    return BoundedValue(value=value, lower=lower, upper=upper, method=method,
                        detail={"pairs": details, "infinite_pairs": infinite_pairs})


@dataclass(frozen=True)
class ChainReport:
    """l2 <= l1 <= L comparison for one element, at the bound level."""

    seminorm_value: float
    l1_result: BoundedValue
    l2_result: BoundedValue
    tolerance: float
    l2_le_l1: bool
    l1_le_l: bool

    @property
    def chain_ok(self) -> bool:
        return self.l2_le_l1 and self.l1_le_l


def chain_check(a: AlgebraElement, L: Seminorm, *, seed: int = 0,
                tolerance: float = CHAIN_TOL, pool: CutPool | None = None) -> ChainReport:
    """Compute L(a), l1(a), l2(a) and verify the chain inequalities.

    For sampled paths the comparison is bound-aware: a violation is
    claimed only when the certified brackets prove one.
    """
    pool = pool if pool is not None else CutPool()
    lval = seminorm_eval(L, a)
    r1 = l1(a, L, seed=seed, pool=pool)
    r2 = l2(a, L, seed=seed, pool=pool)
    return ChainReport(
        seminorm_value=lval,
        l1_result=r1,
        l2_result=r2,
        tolerance=tolerance,
        l2_le_l1=(r2.lower <= r1.upper + tolerance),
        l1_le_l=(r1.lower <= lval + tolerance),
    )


# ---------------------------------------------------------------------------
# Question probe: is l2 subadditive / Leibniz on commutative subalgebras?
# ---------------------------------------------------------------------------

def _element_payload(a: AlgebraElement) -> list:
    return [[[ [z.real, z.imag] for z in row] for row in blk] for blk in a.blocks]


@dataclass(frozen=True)
class ProbeReport:
    trials: int
    violations: list
    max_subadd_excess: float
    max_leibniz_excess: float

    @property
    def clean(self) -> bool:
        return not self.violations


def subadditivity_probe(L: Seminorm, algebra: FiniteAlgebra, trials: int,
                        seed: int) -> ProbeReport:
    """Sample commuting Hermitian pairs and test l2 against subadditivity
    and the Leibniz inequality, at the bound level.

    Pairs are drawn by fixing a random eigenbasis per block (a random
    commutative subalgebra) and assigning independent spectra.  Confirmed
    violations are recorded with full instance data for replay.
    """
    rng = np.random.default_rng(seed)
    violations = []
    max_sub = -math.inf
    max_leib = -math.inf
    for t in range(int(trials)):
        bases = []
        for n in algebra.blocks:
            g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            q, _ = np.linalg.qr(g)
            bases.append(q)
        spec_a = [rng.standard_normal(n) for n in algebra.blocks]
        spec_b = [rng.standard_normal(n) for n in algebra.blocks]
        a = AlgebraElement(algebra, tuple(
            (q * s) @ q.conj().T for q, s in zip(bases, spec_a)))
        b = AlgebraElement(algebra, tuple(
            (q * s) @ q.conj().T for q, s in zip(bases, spec_b)))
        pool = CutPool()
        ra = l2(a, L, seed=seed + t, pool=pool)
        rb = l2(b, L, seed=seed + t, pool=pool)
        rsum = l2(a + b, L, seed=seed + t, pool=pool)
        rprod = l2(a @ b, L, seed=seed + t, pool=pool)
        na, nb = a.norm_op(), b.norm_op()

        sub_excess = rsum.lower - (ra.upper + rb.upper)
        leib_excess = rprod.lower - (ra.upper * nb + na * rb.upper)
        if not math.isnan(sub_excess):
            max_sub = max(max_sub, sub_excess)
        if not math.isnan(leib_excess):
            max_leib = max(max_leib, leib_excess)
        if sub_excess > CHAIN_TOL or leib_excess > CHAIN_TOL:
            violations.append({
                "trial": t,
                "kind": "subadditivity" if sub_excess > CHAIN_TOL else "leibniz",
                "excess": float(max(sub_excess, leib_excess)),
                "algebra": list(algebra.blocks),
                "a": _element_payload(a),
                "b": _element_payload(b),
                "l2_a": [ra.lower, ra.upper],
                "l2_b": [rb.lower, rb.upper],
                "l2_sum": [rsum.lower, rsum.upper],
                "l2_prod": [rprod.lower, rprod.upper],
            })
    return ProbeReport(
        trials=int(trials),
        violations=violations,
        max_subadd_excess=max_sub,
        max_leibniz_excess=max_leib,
    )
