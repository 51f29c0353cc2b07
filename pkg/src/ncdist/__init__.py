"""Metric geometry on state spaces of finite-dimensional C*-algebras.

Monge-Kantorovich distances, Hausdorff and infimum distances between
faces and convex state sets, the induced seminorm analogs, and a fuzzy
quantum-torus harness for sub-circle distance experiments.
"""

__version__ = "0.1.0"

from .algebra import (
    AlgebraElement,
    FiniteAlgebra,
    Projection,
    State,
    StateSet,
    commutative_algebra,
    face_from_character,
    face_from_projection,
    is_state,
    sample_extreme_states,
)
from .classical import (
    FiniteMetricSpace,
    hausdorff,
    infimum,
    lip,
    lip_via_levels,
    lip_via_states,
    mk_distance,
    mk_distance_detailed,
    random_euclidean_space,
    verify_embedding,
)
from .errors import (
    EmptySetError,
    InvalidInputError,
    NcdistError,
    NumericalFailureError,
    ShapeMismatchError,
    UnsupportedKindError,
)
from .hyper import DistanceResult, SearchOptions, hausdorff_distance, infimum_distance
from .lipanalog import chain_check, l1, l2, spectral_faces, subadditivity_probe
from .numerics import (
    LinearProgram,
    LPSolution,
    eigh,
    project_to_density,
    solve_lp,
)
from .qmetric import (
    CutPool,
    DerivationSeminorm,
    PolyhedralSeminorm,
    RhoResult,
    derivation_from_commutators,
    from_metric,
    kernel_check,
    rho,
    seminorm_eval,
    separation_check,
)
from .torus import (
    FuzzyTorusConfig,
    build,
    classical_baseline,
    subcircle,
    subcircle_distance_table,
    torus_seminorm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
