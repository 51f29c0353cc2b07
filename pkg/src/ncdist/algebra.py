"""Finite-dimensional C*-algebras, their states, projections and faces.

An algebra is a direct sum of matrix blocks, so every element (and every
state, via its density matrix) is a list of square complex blocks.  The
commutative case is the one where all blocks have size one; states are
then probability vectors and the machinery below reduces to measures on
a finite set.

Two kinds of convex state sets are modeled intensionally:

* faces attached to a projection p, ``{mu : mu(p) = 1}``, and
* moment sets cut out by finitely many linear constraints
  ``mu(c_j) = z_j``.

Sets carry membership tests, never point clouds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import (
    EmptySetError,
    InvalidInputError,
    ShapeMismatchError,
    UnsupportedKindError,
)

PSD_TOL = 1e-10
CONSTRAINT_TOL = 1e-9

__all__ = [
    "FiniteAlgebra",
    "AlgebraElement",
    "State",
    "Projection",
    "StateSet",
    "is_state",
    "face_from_projection",
    "face_from_character",
    "sample_extreme_states",
    "commutative_algebra",
]


@dataclass(frozen=True)
class FiniteAlgebra:
    """Direct sum of full matrix algebras, given by its block sizes."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(int(b) for b in self.blocks)
        if not blocks or any(b < 1 for b in blocks):
            raise InvalidInputError("algebra needs at least one block of positive size")
        object.__setattr__(self, "blocks", blocks)

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def dim_sa(self) -> int:
        """Real dimension of the self-adjoint part, sum of n_i^2."""
        return sum(n * n for n in self.blocks)

    @property
    def is_commutative(self) -> bool:
        return all(n == 1 for n in self.blocks)

    def check_shapes(self, blocks) -> list[np.ndarray]:
        if len(blocks) != self.num_blocks:
            raise ShapeMismatchError(
                f"expected {self.num_blocks} blocks, got {len(blocks)}"
            )
        out = []
        for n, b in zip(self.blocks, blocks):
            b = np.asarray(b, dtype=complex)
            if b.shape != (n, n):
                raise ShapeMismatchError(f"block of shape {b.shape} does not match size {n}")
            out.append(b)
        return out

    def identity(self) -> "AlgebraElement":
        return AlgebraElement(self, tuple(np.eye(n, dtype=complex) for n in self.blocks))

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, tuple(np.zeros((n, n), dtype=complex) for n in self.blocks))


def commutative_algebra(n: int) -> FiniteAlgebra:
    """The algebra of functions on an n-point set (all blocks size one)."""
    return FiniteAlgebra(blocks=(1,) * n)


@dataclass(frozen=True)
class AlgebraElement:
    """An element of a finite algebra, stored block by block."""

    algebra: FiniteAlgebra
    blocks: tuple

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.algebra.check_shapes(self.blocks)))

    # -- algebra structure ---------------------------------------------

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._same(other)
        return AlgebraElement(self.algebra, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._same(other)
        return AlgebraElement(self.algebra, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __mul__(self, s) -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(s * a for a in self.blocks))

    __rmul__ = __mul__

    def __matmul__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._same(other)
        return AlgebraElement(self.algebra, tuple(a @ b for a, b in zip(self.blocks, other.blocks)))

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(a.conj().T for a in self.blocks))

    def _same(self, other: "AlgebraElement") -> None:
        if other.algebra.blocks != self.algebra.blocks:
            raise ShapeMismatchError("elements live on different algebras")

    # -- numerics ------------------------------------------------------

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol for a in self.blocks)

    def norm_op(self) -> float:
        """Operator norm: the largest singular value over the blocks."""
        return max(float(np.linalg.norm(a, 2)) for a in self.blocks)

    def total_trace(self) -> complex:
        return complex(sum(np.trace(a) for a in self.blocks))

    def to_vec(self) -> np.ndarray:
        """Real coordinates; requires a Hermitian element."""
        if not self.is_hermitian(1e-9):
            raise InvalidInputError("realification is defined for Hermitian elements")
        return np.concatenate([numerics.hermitian_to_vec(a) for a in self.blocks])

    @staticmethod
    def from_vec(algebra: FiniteAlgebra, v: np.ndarray) -> "AlgebraElement":
        v = np.asarray(v, dtype=float)
        out, pos = [], 0
        for n in algebra.blocks:
            out.append(numerics.vec_to_hermitian(v[pos:pos + n * n], n))
            pos += n * n
        if pos != v.shape[0]:
            raise ShapeMismatchError("coordinate vector has the wrong length")
        return AlgebraElement(algebra, tuple(out))


def pairing(h: AlgebraElement, a: AlgebraElement) -> complex:
    """Trace pairing sum_i trace(h_i a_i)."""
    h._same(a)
    return complex(sum(np.trace(x @ y) for x, y in zip(h.blocks, a.blocks)))


@dataclass(frozen=True)
class State:
    """Block-diagonal density matrix; evaluates elements by the trace pairing."""

    algebra: FiniteAlgebra
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(self.algebra.check_shapes(self.blocks))
        object.__setattr__(self, "blocks", blocks)
        ok, diag = is_state(self.algebra, blocks)
        if not ok:
            raise InvalidInputError(f"not a state: {diag}")

    def __call__(self, a: AlgebraElement) -> complex:
        if a.algebra.blocks != self.algebra.blocks:
            raise ShapeMismatchError("element lives on a different algebra")
        return complex(sum(np.trace(r @ b) for r, b in zip(self.blocks, a.blocks)))

    def expect(self, a: AlgebraElement) -> float:
        """Real expectation value of a Hermitian element."""
        return float(self(a).real)

    def as_element(self) -> AlgebraElement:
        return AlgebraElement(self.algebra, self.blocks)

    def to_vec(self) -> np.ndarray:
        return np.concatenate([numerics.hermitian_to_vec(b) for b in self.blocks])

    @staticmethod
    def maximally_mixed(algebra: FiniteAlgebra) -> "State":
        d = sum(algebra.blocks)
        return State(algebra, tuple(np.eye(n, dtype=complex) / d for n in algebra.blocks))

    @staticmethod
    def from_weights(algebra: FiniteAlgebra, weights) -> "State":
        """Commutative state from a probability vector."""
        if not algebra.is_commutative:
            raise InvalidInputError("from_weights needs a commutative algebra")
        w = np.asarray(weights, dtype=float)
        return State(algebra, tuple(np.array([[wi]], dtype=complex) for wi in w))


def is_state(algebra: FiniteAlgebra, candidate) -> tuple[bool, dict]:
    """PSD and trace-one test with diagnostics.

    Returns ``(ok, diagnostics)`` where the diagnostics carry the least
    eigenvalue found and the total trace.  Shape mismatches raise.
    """
    blocks = algebra.check_shapes(candidate)
    min_eig = np.inf
    herm_dev = 0.0
    total = 0.0
    for b in blocks:
        herm_dev = max(herm_dev, float(np.max(np.abs(b - b.conj().T), initial=0.0)))
        w = np.linalg.eigvalsh(0.5 * (b + b.conj().T))
        if w.size:
            min_eig = min(min_eig, float(w[0]))
        total += float(np.trace(b).real)
    ok = herm_dev <= 1e-9 and min_eig >= -PSD_TOL and abs(total - 1.0) <= PSD_TOL
    return ok, {"min_eigenvalue": min_eig, "trace": total, "hermitian_deviation": herm_dev}


@dataclass(frozen=True)
class Projection:
    """Hermitian idempotent, block by block."""

    algebra: FiniteAlgebra
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(self.algebra.check_shapes(self.blocks))
        for b in blocks:
            if np.max(np.abs(b - b.conj().T), initial=0.0) > 1e-9:
                raise InvalidInputError("projection block is not Hermitian")
            if np.max(np.abs(b @ b - b), initial=0.0) > 1e-9:
                raise InvalidInputError("projection block is not idempotent")
        object.__setattr__(self, "blocks", blocks)

    @property
    def rank(self) -> int:
        return int(round(sum(float(np.trace(b).real) for b in self.blocks)))

    def block_ranks(self) -> list[int]:
        return [int(round(float(np.trace(b).real))) for b in self.blocks]

    def as_element(self) -> AlgebraElement:
        return AlgebraElement(self.algebra, self.blocks)

    def leq(self, other: "Projection") -> bool:
        """Projection order p <= q, i.e. pq = p."""
        return all(
            np.max(np.abs(p @ q - p), initial=0.0) <= 1e-8
            for p, q in zip(self.blocks, other.blocks)
        )

    @staticmethod
    def from_indicator(algebra: FiniteAlgebra, indices) -> "Projection":
        """Commutative projection: the indicator of a subset of points."""
        if not algebra.is_commutative:
            raise InvalidInputError("indicator projections need a commutative algebra")
        chosen = set(int(i) for i in indices)
        blocks = tuple(
            np.array([[1.0 + 0j]]) if i in chosen else np.array([[0.0 + 0j]])
            for i in range(algebra.num_blocks)
        )
        return Projection(algebra, blocks)


@dataclass(frozen=True)
class StateSet:
    """A convex set of states: a face of a projection, or a moment set.

    Face sets are ``{mu : mu(p) = 1}``; a state belongs iff its density
    is supported in the range of p (``rho == p rho p``).  Moment sets are
    ``{mu : mu(c_j) = z_j for all j}``.
    """

    algebra: FiniteAlgebra
    kind: str  # "face" | "moment"
    projection: Projection | None = None
    constraints: tuple = ()
    targets: tuple = ()

    def contains(self, state: State, tol: float = CONSTRAINT_TOL) -> bool:
        if state.algebra.blocks != self.algebra.blocks:
            raise ShapeMismatchError("state lives on a different algebra")
        if self.kind == "face":
            for rho, p in zip(state.blocks, self.projection.blocks):
                if np.max(np.abs(rho - p @ rho @ p), initial=0.0) > tol:
                    return False
            return True
        for c, z in zip(self.constraints, self.targets):
            if abs(state(c) - z) > tol:
                return False
        return True

    def is_singleton(self) -> bool:
        """True when the set is provably a single state (rank-one face)."""
        return self.kind == "face" and self.projection.rank == 1

    def singleton_state(self) -> State:
        if not self.is_singleton():
            raise UnsupportedKindError("state set is not a known singleton")
        return State(self.algebra, self.projection.blocks)


def face_from_projection(p: Projection) -> StateSet:
    """The weak*-closed face of the state space attached to a projection.

    The zero projection has an empty face and is rejected here; infimum
    distances to empty sets are handled downstream by the +infinity
    convention.
    """
    if p.rank == 0:
        raise EmptySetError("the zero projection carries an empty face")
    return StateSet(algebra=p.algebra, kind="face", projection=p)


def face_from_character(
    basis: list[AlgebraElement],
    values: list[complex],
) -> StateSet:
    """Moment set of states matching a character on a subalgebra basis.

    Constraints proportional to the identity must carry the consistent
    value (a character is unital); anything else is rejected.
    """
    if len(basis) != len(values):
        raise InvalidInputError("need one target value per constraint element")
    if not basis:
        raise InvalidInputError("need at least one constraint element (or the identity)")
    algebra = basis[0].algebra
    for c, z in zip(basis, values):
        if c.algebra.blocks != algebra.blocks:
            raise ShapeMismatchError("constraint elements live on different algebras")
        ident = algebra.identity()
        # Scalar multiples of the identity are legal constraints only when
        # the target equals the same scalar.
        dim = sum(algebra.blocks)
        scale = c.total_trace() / dim
        if all(
            np.max(np.abs(cb - scale * ib), initial=0.0) <= 1e-10
            for cb, ib in zip(c.blocks, ident.blocks)
        ):
            if abs(complex(z) - scale) > 1e-9:
                raise InvalidInputError(
                    f"identity-type constraint must take value {scale}, got {z}"
                )
    return StateSet(
        algebra=algebra,
        kind="moment",
        constraints=tuple(basis),
        targets=tuple(complex(z) for z in values),
    )


def sample_extreme_states(s: StateSet, count: int, seed: int) -> list[State]:
    """Seeded pure states on the extreme boundary of a face.

    Draws isotropic Gaussian vectors in the range of the projection,
    one block at a time (block chosen with probability proportional to
    its rank, since pure states of a direct sum live in a single block).
    Deterministic for a fixed seed.  Moment sets are not supported: their
    extreme points have no parameterization here.
    """
    if s.kind != "face":
        raise UnsupportedKindError("extreme-state sampling needs a face-of-projection set")
    rng = np.random.default_rng(seed)
    p = s.projection
    ranks = p.block_ranks()
    total = sum(ranks)
    if total == 0:
        raise EmptySetError("empty face")
    probs = np.array(ranks, dtype=float) / total
    # Orthonormal bases of the ranges, once per block.
    bases = []
    for blk, r in zip(p.blocks, ranks):
        if r == 0:
            bases.append(None)
            continue
        w, v = np.linalg.eigh(blk)
        bases.append(v[:, w > 0.5])
    out = []
    for _ in range(int(count)):
        b = int(rng.choice(len(ranks), p=probs))
        u = bases[b]
        r = ranks[b]
        coeffs = rng.standard_normal(r) + 1j * rng.standard_normal(r)
        psi = u @ (coeffs / np.linalg.norm(coeffs))
        blocks = [np.zeros((n, n), dtype=complex) for n in s.algebra.blocks]
        blocks[b] = np.outer(psi, psi.conj())
        out.append(State(s.algebra, tuple(blocks)))
    return out
