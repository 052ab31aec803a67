"""JSON problem specs in, JSON/CSV reports out.

Complex numbers are ``[re, im]`` pairs (plain numbers are accepted on
input), matrices are row-major nested arrays, and every float is written
with 17 significant digits so reports round-trip exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

import jsonschema
import numpy as np

from . import linalg
from .errors import DimensionMismatch, InputError
from .noise import (
    FAMILIES,
    KrausChannel,
    amplitude_damping,
    coherent_overrotation,
    depolarizing,
    identity_channel,
    noisy_gate,
    phase_damping,
)
from .phase import pauli_compose
from .qstate import DensityMatrixState, Gate, GateSequence, PureState, make_density, make_pure, mix, prepare

SCHEMA_VERSION = 1


def load_schema(name: str = "problem-spec.json") -> dict:
    text = resources.files("weakval").joinpath("schema", name).read_text(encoding="utf-8")
    return json.loads(text)


# ---------------------------------------------------------------- parsing


def parse_complex(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise InputError(f"complex numbers are [re, im] pairs, got {x!r}")
        return complex(float(x[0]), float(x[1]))
    return complex(float(x))


def parse_vector(rows) -> np.ndarray:
    return linalg.as_vector([parse_complex(x) for x in rows])


def parse_matrix(rows) -> np.ndarray:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError("matrices are arrays of rows")
    widths = {len(r) for r in rows}
    if widths != {len(rows)}:
        raise DimensionMismatch(f"matrix with {len(rows)} rows has row lengths {sorted(widths)}")
    return linalg.as_matrix([[parse_complex(x) for x in r] for r in rows])


def parse_observable(obj) -> np.ndarray:
    if isinstance(obj, dict):
        return pauli_compose({k.upper(): parse_complex(v) for k, v in obj.items()})
    return parse_matrix(obj)


def parse_gate(obj: dict) -> Gate:
    if "targets" in obj:
        targets = tuple(obj["targets"])
    elif "target" in obj:
        targets = (obj["target"],)
    else:
        targets = (0,)
    matrix = parse_matrix(obj["matrix"]) if "matrix" in obj else None
    return Gate(obj["gate"], targets, angle=obj.get("angle"), matrix=matrix)


def parse_gates(items) -> GateSequence:
    return GateSequence(tuple(parse_gate(g) for g in items))


def parse_pure(obj: dict, dim: int) -> PureState:
    if "vector" in obj:
        psi = make_pure(parse_vector(obj["vector"]))
    elif "gates" in obj:
        sequence = parse_gates(obj["gates"])
        if linalg.num_qubits(dim) < 0:
            raise DimensionMismatch(f"gate preparations need dim = 2^n, observable has dim {dim}")
        psi = prepare(sequence, dim)
    else:
        raise InputError("a pure state needs exactly one of 'vector' or 'gates'")
    if psi.dim != dim:
        raise DimensionMismatch(f"state of dim {psi.dim} does not match observable of dim {dim}")
    return psi


@dataclass
class Options:
    epsilon_orth: float = 1e-12
    epsilon_mag: float = 1e-12
    eig_tol: float = 1e-10
    seed: int = 42
    shots: int = 10000
    tolerances: dict[str, float] = field(default_factory=dict)


@dataclass
class ProblemSpec:
    observable: np.ndarray
    pure: PureState | None
    mixed: DensityMatrixState | None
    mixture: list[tuple[float, PureState]] | None
    postselect: PureState | None
    options: Options
    witness: dict | None
    raw: dict

    @property
    def dim(self) -> int:
        return self.observable.shape[0]

    @property
    def is_mixed(self) -> bool:
        return self.pure is None


def parse_problem(doc: Any) -> ProblemSpec:
    """Validate against the shipped schema, then build the numerical objects."""
    try:
        jsonschema.validate(doc, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"problem spec invalid at {where}: {exc.message}") from None

    a = parse_observable(doc["observable"])
    dim = a.shape[0]
    pre = doc["preselect"]
    pure = mixed = mixture = None
    if "density" in pre:
        mixed = make_density(parse_matrix(pre["density"]))
        if mixed.dim != dim:
            raise DimensionMismatch(f"density matrix of dim {mixed.dim} does not match observable of dim {dim}")
    elif "mixture" in pre:
        mixture = [(float(c["p"]), parse_pure(c["state"], dim)) for c in pre["mixture"]]
        mixed = mix(mixture)
    else:
        pure = parse_pure(pre, dim)
    post = parse_pure(doc["postselect"], dim) if "postselect" in doc else None
    options = Options(**doc.get("options", {}))
    return ProblemSpec(a, pure, mixed, mixture, post, options, doc.get("witness"), doc)


def parse_channel(obj: dict, a: np.ndarray, theta: float) -> KrausChannel:
    """Build the full noisy gate described by ``obj``.

    Unless ``includes_gate`` is true, the described noise is composed after
    the ideal gate ``exp(-i theta A)``.
    """
    kind = obj["type"]
    param = obj.get("param", 0.0)
    if kind == "identity":
        noise = identity_channel(a.shape[0])
    elif kind == "depolarizing":
        noise = depolarizing(param)
    elif kind == "amplitude_damping":
        noise = amplitude_damping(param)
    elif kind == "phase_damping":
        noise = phase_damping(param)
    elif kind == "overrotation":
        noise = coherent_overrotation(a, param)
    elif kind == "kraus":
        if "ops" not in obj:
            raise InputError("kraus channel needs 'ops'")
        noise = KrausChannel(tuple(parse_matrix(k) for k in obj["ops"]), obj.get("label", "kraus"))
    else:
        raise InputError(f"unknown channel type {kind!r}")
    if obj.get("includes_gate", False):
        return noise
    return noisy_gate(a, theta, noise)


def channel_family(name: str, a: np.ndarray, theta: float):
    try:
        return FAMILIES[name](a, theta)
    except KeyError:
        raise InputError(f"unknown sweep family {name!r}") from None


# ---------------------------------------------------------- serialization


def encode_complex(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def encode_matrix(m: np.ndarray) -> list[list[list[float]]]:
    return [[encode_complex(x) for x in row] for row in np.asarray(m)]


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = "%.17g" % (x + 0.0)  # folds -0.0 into 0.0
    # Keep an explicit float marker so integers and floats stay distinguishable.
    if not any(c in s for c in ".eEn"):
        s += ".0"
    return s


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text with floats at 17 significant digits."""

    def enc(o, level: int) -> str:
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if o is None or isinstance(o, bool):
            return json.dumps(o)
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return _fmt_float(float(o))
        if isinstance(o, (complex, np.complexfloating)):
            return enc(encode_complex(o), level)
        if isinstance(o, str):
            return json.dumps(o, ensure_ascii=False)
        if isinstance(o, np.ndarray):
            return enc(o.tolist(), level)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(str(k))}: {enc(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if all(isinstance(x, (int, float, np.number)) and not isinstance(x, bool) for x in o):
                return "[" + ", ".join(enc(x, level + 1) for x in o) + "]"
            return "[\n" + ",\n".join(pad + enc(x, level + 1) for x in o) + "\n" + end + "]"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(obj, 0) + "\n"
