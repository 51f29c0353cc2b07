"""Problem-file parsing, result serialization, CSV emission and manifests.

JSON is the single input format.  Complex entries are encoded as
``[re, im]`` pairs and matrices are row-major nested lists.  All outputs
are deterministic: canonical key order, fixed float formatting with 12
significant digits, and ``inf`` spelled literally.  Wall-clock timings
live only in the run manifest, which is the one run artifact allowed to
differ between otherwise identical runs; the ``time_ms`` column required
by the fixed CSV header is pinned to 0 for reproducibility.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

try:
    import jsonschema
except ImportError:  # pragma: no cover
    jsonschema = None

from . import __version__ as _version
from .algebra import AlgebraElement, FiniteAlgebra, Projection, State, StateSet, \
    face_from_character, face_from_projection
from .classical import FiniteMetricSpace
from .errors import InvalidInputError
from .qmetric import DerivationSeminorm, PolyhedralSeminorm, Seminorm, \
    derivation_from_commutators, from_metric

CSV_HEADER = "instance_id,quantity,value,lower,upper,method,iterations,time_ms"

__all__ = [
    "CSV_HEADER",
    "ResultRow",
    "RunManifest",
    "format_number",
    "sanitize",
    "dumps_canonical",
    "load_problem",
    "parse_problem",
    "emit_csv",
    "emit_torus_csv",
    "input_hash",
]


# ---------------------------------------------------------------------------
# Canonical JSON
# ---------------------------------------------------------------------------

def format_number(x: float) -> str:
    """12 significant digits; infinities spelled out."""
    if x is None:
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return f"{float(x):.12g}"


def sanitize(obj):
    """Make an object JSON-serializable with the package conventions."""
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isinf(x) or math.isnan(x):
            return format_number(x)
        return x
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.complexfloating, complex)):
        z = complex(obj)
        return [sanitize(z.real), sanitize(z.imag)]
    if isinstance(obj, np.ndarray):
        return sanitize(obj.tolist())
    if isinstance(obj, bool):
        return obj
    return obj


def dumps_canonical(obj) -> str:
    return json.dumps(sanitize(obj), sort_keys=True, indent=2) + "\n"


def input_hash(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


# ---------------------------------------------------------------------------
# Problem files
# ---------------------------------------------------------------------------

_COMPLEX = {"type": "array", "items": {"type": "number"},
            "minItems": 2, "maxItems": 2}
_CMATRIX = {"type": "array", "items": {"type": "array", "items": _COMPLEX}}
_BLOCKS = {"type": "array", "items": _CMATRIX, "minItems": 1}
_RMATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}

PROBLEM_SCHEMA = {
    "type": "object",
    "required": ["task"],
    "properties": {
        "task": {"enum": ["rho", "infimum", "hausdorff", "lip", "l1l2"]},
        "seed": {"type": "integer", "minimum": 0},
        "algebra": {
            "type": "object",
            "required": ["blocks"],
            "properties": {"blocks": {"type": "array",
                                      "items": {"type": "integer", "minimum": 1},
                                      "minItems": 1}},
        },
        "seminorm": {
            "type": "object",
            "required": ["type"],
            "properties": {
                "type": {"enum": ["polyhedral", "from_metric", "derivation"]},
                "generators": {"type": "array",
                               "items": {"type": "object",
                                         "required": ["h", "c"],
                                         "properties": {"h": _BLOCKS,
                                                        "c": {"type": "number"}}}},
                "metric": _RMATRIX,
                "commutators": {"type": "array", "items": _BLOCKS},
                "combine": {"enum": ["max", "sum"]},
            },
        },
        "states": {"type": "array", "items": _BLOCKS, "minItems": 2, "maxItems": 2},
        "sets": {"type": "array", "minItems": 2, "maxItems": 2,
                 "items": {"type": "object", "required": ["kind"],
                           "properties": {
                               "kind": {"enum": ["face", "moment"]},
                               "projection": _BLOCKS,
                               "constraints": {"type": "array", "items": _BLOCKS},
                               "targets": {"type": "array", "items": _COMPLEX},
                           }}},
        "metric": _RMATRIX,
        "function": {"type": "array", "items": {"type": "number"}},
        "element": _BLOCKS,
        "tolerances": {"type": "object"},
    },
}


def _complex_entry(pair) -> complex:
    return complex(pair[0], pair[1])


def _parse_cmatrix(rows) -> np.ndarray:
    return np.array([[_complex_entry(x) for x in row] for row in rows], dtype=complex)


def _parse_element(algebra: FiniteAlgebra, blocks) -> AlgebraElement:
    return AlgebraElement(algebra, tuple(_parse_cmatrix(b) for b in blocks))


def element_payload(a: AlgebraElement) -> list:
    return [[[[z.real, z.imag] for z in row] for row in blk] for blk in a.blocks]


@dataclass(frozen=True)
class Problem:
    task: str
    seed: int
    algebra: FiniteAlgebra | None
    seminorm: Seminorm | None
    states: tuple[State, ...] = ()
    sets: tuple[StateSet, ...] = ()
    space: FiniteMetricSpace | None = None
    function: np.ndarray | None = None
    element: AlgebraElement | None = None
    tolerances: dict = field(default_factory=dict)


def parse_problem(doc: dict) -> Problem:
    """Validate against the schema and build the typed problem."""
    if jsonschema is not None:
        try:
            jsonschema.validate(doc, PROBLEM_SCHEMA)
        except jsonschema.ValidationError as exc:
            path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise InvalidInputError(f"problem file invalid at {path}: {exc.message}")
    task = doc["task"]
    seed = int(doc.get("seed", 0))

    space = None
    if "metric" in doc and doc["metric"] is not None:
        space = FiniteMetricSpace(d=np.asarray(doc["metric"], dtype=float))

    algebra = None
    if "algebra" in doc:
        algebra = FiniteAlgebra(blocks=tuple(doc["algebra"]["blocks"]))

    seminorm = None
    if "seminorm" in doc:
        sdoc = doc["seminorm"]
        kind = sdoc["type"]
        if kind == "from_metric":
            metric = sdoc.get("metric")

            if metric is None:
                if space is None:
                    raise InvalidInputError("from_metric seminorm needs a metric")
                sspace = space
            else:
                sspace = FiniteMetricSpace(d=np.asarray(metric, dtype=float))
            seminorm = from_metric(sspace)
            algebra = seminorm.algebra if algebra is None else algebra
            if algebra.blocks != seminorm.algebra.blocks:
                raise InvalidInputError("metric size does not match the algebra")
        elif kind == "polyhedral":
            if algebra is None:
                raise InvalidInputError("polyhedral seminorm needs an algebra")
            gens = sdoc.get("generators", [])
            if not gens:
                raise InvalidInputError("polyhedral seminorm needs generators")
            pairs = [(_parse_element(algebra, g["h"]), float(g["c"])) for g in gens]
            seminorm = PolyhedralSeminorm.from_elements(pairs)
        else:
            if algebra is None:
                raise InvalidInputError("derivation seminorm needs an algebra")
            gens = [_parse_element(algebra, blocks)
                    for blocks in sdoc.get("commutators", [])]
            if not gens:
                raise InvalidInputError("derivation seminorm needs commutators")
            seminorm = derivation_from_commutators(
                algebra, gens, combine=sdoc.get("combine", "max"))

    states = ()
    if "states" in doc:
        if algebra is None:
            raise InvalidInputError("states need an algebra")
        states = tuple(State(algebra, tuple(_parse_cmatrix(b) for b in blocks))
                       for blocks in doc["states"])

    sets = ()
    if "sets" in doc:
        if algebra is None:
            raise InvalidInputError("state sets need an algebra")
        parsed = []
        for sdoc in doc["sets"]:
            if sdoc["kind"] == "face":
                proj = Projection(algebra,
                                  tuple(_parse_cmatrix(b) for b in sdoc["projection"]))
                parsed.append(face_from_projection(proj))
            else:
                cons = [_parse_element(algebra, b) for b in sdoc.get("constraints", [])]
                targets = [_complex_entry(t) for t in sdoc.get("targets", [])]
                parsed.append(face_from_character(cons, targets))
        sets = tuple(parsed)

    function = None
    if "function" in doc:
        function = np.asarray(doc["function"], dtype=float)

    element = None
    if "element" in doc:
        if algebra is None:
            raise InvalidInputError("an element needs an algebra")
        element = _parse_element(algebra, doc["element"])

    return Problem(task=task, seed=seed, algebra=algebra, seminorm=seminorm,
                   states=states, sets=sets, space=space, function=function,
                   element=element, tolerances=dict(doc.get("tolerances", {})))


def load_problem(path: str) -> tuple[Problem, bytes]:
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        doc = json.loads(raw.decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidInputError(
            f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(doc, dict):
        raise InvalidInputError("problem file must hold a JSON object")
    return parse_problem(doc), raw


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResultRow:
    instance_id: str
    quantity: str
    value: float
    lower: float
    upper: float
    method: str
    iterations: int
    time_ms: int = 0


def emit_csv(rows: list[ResultRow], path: str) -> None:
    """Write results in the fixed layout, 12 significant digits.

    Row order is the caller's (deterministic by construction); the
    time_ms column is pinned to 0 so byte-identical reruns stay
    byte-identical (wall-clock timings live in the run manifest).
    """
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join([
            r.instance_id,
            r.quantity,
            format_number(r.value),
            format_number(r.lower),
            format_number(r.upper),
            r.method,
            str(int(r.iterations)),
            str(int(r.time_ms)),
        ]))
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise InvalidInputError(f"cannot write CSV to {path}: {exc}")


def _format_z(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}j"


def emit_torus_csv(table, path: str) -> None:
    """Upper-triangle sub-circle table in its documented column layout."""
    header = "z,z2,I_value,I_lower,I_upper,H_value,H_lower,H_upper,method"
    lines = [header]
    for row in table.rows():
        lines.append(",".join([
            _format_z(row["z"]),
            _format_z(row["z2"]),
            format_number(row["I_value"]),
            format_number(row["I_lower"]),
            format_number(row["I_upper"]),
            format_number(row["H_value"]),
            format_number(row["H_lower"]),
            format_number(row["H_upper"]),
            row["method"],
        ]))
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise InvalidInputError(f"cannot write CSV to {path}: {exc}")


# ---------------------------------------------------------------------------
# Run manifest
# ---------------------------------------------------------------------------

@dataclass
class RunManifest:
    """Run metadata: version, input hash, seed, timings, tolerances.

    Emitted on every run.  This is the one artifact that may differ
    between reruns (it carries wall-clock timings).
    """

    input_hash: str
    seed: int
    tool_version: str = _version
    timings_ms: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    def write(self, path: str) -> None:
        doc = {
            "tool_version": self.tool_version,
            "input_hash": self.input_hash,
            "seed": self.seed,
            "timings_ms": self.timings_ms,
            "tolerances": self.tolerances,
        }
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps_canonical(doc))
