"""JSON encodings and published schemas for files and CLI output.

Complex numbers are ``[re, im]`` pairs; angles are fractions of a full turn.
Files carry a ``schema`` tag of the form ``twistops.<kind>/<version>``.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .angles import Angle
from .errors import ValidationError
from .fock import Representation
from .relations import Signature
from .structured import StructuredOp

__all__ = [
    "SCHEMAS",
    "REP_SCHEMA",
    "PAIR_SCHEMA",
    "MATRICES_SCHEMA",
    "dense_to_json",
    "dense_from_json",
    "sparse_to_json",
    "sparse_from_json",
    "rep_to_json",
    "rep_from_json",
    "pair_to_json",
    "pair_from_json",
    "twist_to_json",
    "twist_from_json",
    "check_schema_tag",
]

REP_SCHEMA = "twistops.representation/1"
PAIR_SCHEMA = "twistops.pair/1"
MATRICES_SCHEMA = "twistops.matrices/1"


def dense_to_json(M) -> list:
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def dense_from_json(obj) -> np.ndarray:
    try:
        return np.array([[complex(re, im) for re, im in row] for row in obj], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"matrix entries must be [re, im] pairs: {exc}") from exc


def sparse_to_json(M) -> dict:
    C = sp.coo_matrix(M)
    return {
        "shape": list(C.shape),
        "entries": [[int(r), int(c), [float(v.real), float(v.imag)]] for r, c, v in zip(C.row, C.col, C.data)],
    }


def sparse_from_json(obj) -> sp.csr_matrix:
    shape = tuple(obj["shape"])
    ent = obj["entries"]
    if not ent:
        return sp.csr_matrix(shape, dtype=complex)
    rows = [e[0] for e in ent]
    cols = [e[1] for e in ent]
    vals = [complex(*e[2]) for e in ent]
    return sp.csr_matrix((vals, (rows, cols)), shape=shape, dtype=complex)


def _pair_key(p) -> str:
    return f"{p[0]},{p[1]}"


def _parse_pair_key(k: str) -> tuple:
    i, j = k.strip("()").split(",")
    return int(i), int(j)


def twist_to_json(t):
    if isinstance(t, Angle):
        return {"angle": t.to_json()}
    if isinstance(t, StructuredOp):
        return {"op": t.to_json()}
    arr = np.asarray(t)
    if arr.ndim == 0:
        z = complex(arr)
        return {"scalar": [z.real, z.imag]}
    return {"matrix": dense_to_json(arr)}


def twist_from_json(obj):
    if "angle" in obj:
        return Angle.from_json(obj["angle"])
    if "op" in obj:
        return StructuredOp.from_json(obj["op"])
    if "scalar" in obj:
        return complex(*obj["scalar"])
    if "matrix" in obj:
        return dense_from_json(obj["matrix"])
    raise ValidationError("twist must have one of the keys angle, op, scalar, matrix")


def rep_to_json(rep: Representation) -> dict:
    return {
        "schema": REP_SCHEMA,
        "name": rep.name,
        "sig": [rep.sig.m, rep.sig.n],
        "kinds": list(rep.kinds),
        "L": rep.L,
        "dim_k": rep.dim_k,
        "labels": rep.labels.tolist(),
        "s_mats": [sparse_to_json(M) for M in rep.s_mats],
        "u_mats": {_pair_key(p): sparse_to_json(M) for p, M in rep.u_mats.items()},
        "twist": {_pair_key(p): twist_to_json(t) for p, t in rep.twist.items()},
    }


def check_schema_tag(obj: dict, expected: str) -> None:
    tag = obj.get("schema")
    if tag != expected:
        raise ValidationError(f"expected a {expected} document, got schema {tag!r}", schema=tag)


def rep_from_json(obj: dict) -> Representation:
    check_schema_tag(obj, REP_SCHEMA)
    sig = Signature(*obj["sig"])
    return Representation(
        sig,
        tuple(obj["kinds"]),
        int(obj["L"]),
        int(obj["dim_k"]),
        np.array(obj["labels"], dtype=np.int64).reshape(-1, 1 + len(obj["kinds"])),
        tuple(sparse_from_json(M) for M in obj["s_mats"]),
        {_parse_pair_key(k): sparse_from_json(M) for k, M in obj["u_mats"].items()},
        {_parse_pair_key(k): twist_from_json(t) for k, t in obj.get("twist", {}).items()},
        obj.get("name", ""),
    )


def pair_to_json(ops, twist=None) -> dict:
    out = {"schema": PAIR_SCHEMA, "ops": [op.to_json() for op in ops]}
    if twist is not None:
        out["twist"] = twist_to_json(twist)
    return out


def pair_from_json(obj: dict) -> tuple[list, object]:
    check_schema_tag(obj, PAIR_SCHEMA)
    ops = [StructuredOp.from_json(o) for o in obj["ops"]]
    twist = twist_from_json(obj["twist"]) if "twist" in obj else None
    return ops, twist


# ---------------------------------------------------------------------------
# JSON Schemas (draft 2020-12)

_complex = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_dense = {"type": "array", "items": {"type": "array", "items": _complex}}
_sparse = {
    "type": "object",
    "required": ["shape", "entries"],
    "properties": {
        "shape": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
        "entries": {
            "type": "array",
            "items": {"type": "array", "prefixItems": [{"type": "integer"}, {"type": "integer"}, _complex]},
        },
    },
}
_angle = {
    "oneOf": [
        {
            "type": "object",
            "required": ["rational"],
            "properties": {"rational": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}},
        },
        {
            "type": "object",
            "required": ["real", "irrational"],
            "properties": {"real": {"type": "number"}, "irrational": {"const": True}, "exact": {"type": "string"}},
        },
    ]
}
_group = {
    "type": "object",
    "required": ["rank", "torsion"],
    "properties": {
        "rank": {"type": "integer", "minimum": 0},
        "torsion": {"type": "array", "items": {"type": "integer", "minimum": 2}},
    },
}
_kgroups = {"type": "object", "required": ["k0", "k1"], "properties": {"k0": _group, "k1": _group}}
_dim = {"oneOf": [{"type": "integer", "minimum": 0}, {"const": "inf"}]}
_subspace = {
    "type": "object",
    "required": ["dim", "exact", "blocks"],
    "properties": {"dim": _dim, "exact": {"type": "boolean"}, "blocks": {"type": "array"}},
}
_single = {
    "type": "object",
    "required": ["type", "theta", "params", "k_groups"],
    "properties": {
        "kind": {"const": "single"},
        "type": {"enum": ["I", "II", "III", "IV"]},
        "theta": _angle,
        "params": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 1}},
        "k_groups": _kgroups,
        "trace": {"type": "array", "items": {"type": "string"}},
    },
}
_shift_block = {
    "type": "object",
    "required": ["type", "lattice", "v"],
    "properties": {
        "type": {"const": "shift"},
        "lattice": {"type": "array", "items": {"enum": ["N", "Z"]}},
        "v": {"type": "array", "items": {"type": "integer"}},
        "w": {"type": "array", "items": _angle},
        "lam": _complex,
        "phase": _angle,
        "dom": {"type": "array", "items": {"type": "integer"}},
    },
}
_finite_block = {
    "type": "object",
    "required": ["type", "matrix"],
    "properties": {"type": {"const": "finite"}, "matrix": _dense},
}
_op = {
    "type": "object",
    "required": ["blocks"],
    "properties": {"blocks": {"type": "array", "items": {"oneOf": [_shift_block, _finite_block]}}},
}
_twist = {
    "type": "object",
    "minProperties": 1,
    "maxProperties": 1,
    "properties": {"angle": _angle, "op": _op, "scalar": _complex, "matrix": _dense},
    "additionalProperties": False,
}

SCHEMAS = {
    "normal_word": {
        "type": "object",
        "required": ["twist", "alpha", "beta"],
        "properties": {
            "twist": {
                "type": "object",
                "patternProperties": {r"^\(\d+,\d+\)$": {"type": "integer"}},
                "additionalProperties": False,
            },
            "alpha": {"type": "array", "items": {"type": "integer"}},
            "beta": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        },
    },
    "word_eq": {
        "type": "object",
        "required": ["equal", "left", "right"],
        "properties": {"equal": {"type": "boolean"}},
    },
    "k_groups": _kgroups,
    "representation": {
        "type": "object",
        "required": ["schema", "sig", "kinds", "L", "dim_k", "labels", "s_mats", "u_mats"],
        "properties": {
            "schema": {"const": REP_SCHEMA},
            "sig": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2},
            "kinds": {"type": "array", "items": {"enum": ["N", "Z"]}},
            "L": {"type": "integer", "minimum": 1},
            "dim_k": {"type": "integer", "minimum": 1},
            "labels": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
            "s_mats": {"type": "array", "items": _sparse},
            "u_mats": {"type": "object", "additionalProperties": _sparse},
            "twist": {"type": "object", "additionalProperties": _twist},
        },
    },
    "residuals": {
        "type": "object",
        "required": ["residuals", "max", "ok", "tol", "faithfulness_witness", "interior_size"],
        "properties": {
            "residuals": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0}},
            "max": {"type": "number"},
            "ok": {"type": "boolean"},
            "tol": {"type": "number"},
            "faithfulness_witness": {"type": "number"},
            "interior_size": {"type": "integer"},
        },
    },
    "wold": {
        "type": "object",
        "required": ["complete", "orthogonal", "exact", "flags", "parts"],
        "properties": {
            "complete": {"type": "boolean"},
            "orthogonal": {"type": "boolean"},
            "exact": {"type": "boolean"},
            "flags": {"type": "array", "items": {"type": "string"}},
            "parts": {
                "type": "object",
                "additionalProperties": {
                    "type": "object",
                    "required": ["W", "B", "H"],
                    "properties": {"W": _subspace, "B": _subspace, "H": _subspace},
                },
            },
        },
    },
    "spectrum": {
        "type": "object",
        "required": ["points", "multiplicities", "report"],
        "properties": {
            "points": {"type": "array", "items": {"type": "array", "items": {"type": "number", "minimum": 0, "exclusiveMaximum": 1}}},
            "multiplicities": {"type": "array", "items": {"type": "integer", "minimum": 1}},
            "report": {
                "type": "object",
                "required": ["verdict", "min_multiplicity", "satisfied"],
                "properties": {"verdict": {"type": "string"}, "satisfied": {"const": False}},
            },
        },
    },
    "classification": {
        "oneOf": [
            _single,
            {
                "type": "object",
                "required": ["kind", "components", "k_groups"],
                "properties": {
                    "kind": {"const": "direct_sum"},
                    "components": {"type": "array", "items": _single, "minItems": 2},
                    "k_groups": _kgroups,
                },
            },
        ]
    },
    "pair": {
        "type": "object",
        "required": ["schema", "ops"],
        "properties": {"schema": {"const": PAIR_SCHEMA}, "ops": {"type": "array", "items": _op}, "twist": _twist},
    },
    "gallery": {
        "type": "object",
        "required": ["name", "pair", "expected"],
        "properties": {"name": {"type": "string"}, "expected": {"$ref": "#/$defs/classification"}},
    },
    "error": {
        "type": "object",
        "required": ["error", "message", "details"],
        "properties": {"error": {"type": "string"}, "message": {"type": "string"}, "details": {"type": "object"}},
    },
}
SCHEMAS["gallery_list"] = {
    "type": "object",
    "required": ["names", "formats"],
    "properties": {
        "names": {"type": "array", "items": {"type": "string"}},
        "formats": {"type": "array", "items": {"type": "string"}},
    },
}
SCHEMAS["gallery"]["$defs"] = {"classification": SCHEMAS["classification"]}
SCHEMAS["gallery"]["properties"]["pair"] = SCHEMAS["pair"]
