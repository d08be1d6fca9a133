"""Body JSON format (format_version 1).

    {"format_version": 1, "dim": d, "kind": "polytope", "vertices": [[...], ...],
     "constructor": {...}}
    {"format_version": 1, "dim": d, "kind": "ball", "center": [...], "radius": r}

Floats are written with Python's shortest round-trip repr, so reading back
gives the same doubles bit for bit.
"""
from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import numpy as np

from ..bodies import BallBody, PolytopeBody
from ..sphere_core import GeometryError

FORMAT_VERSION = 1

_POINT = {"type": "array", "items": {"type": "number"}, "minItems": 3}
_SPEC = {
    "type": "object",
    "required": ["kind", "dim", "params"],
    "properties": {
        "kind": {"type": "string"},
        "dim": {"type": ["integer", "null"]},
        "params": {"type": "object"},
        "seed": {"type": ["integer", "null"]},
    },
}
BODY_SCHEMA = {
    "type": "object",
    "required": ["format_version", "dim", "kind"],
    "properties": {
        "format_version": {"type": "integer"},
        "dim": {"type": "integer", "minimum": 2},
        "kind": {"enum": ["polytope", "ball"]},
        "vertices": {"type": "array", "items": _POINT, "minItems": 1},
        "center": _POINT,
        "radius": {"type": "number", "exclusiveMinimum": 0},
        "constructor": {"oneOf": [_SPEC, {"type": "null"}]},
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "polytope"}}},
         "then": {"required": ["vertices"]}},
        {"if": {"properties": {"kind": {"const": "ball"}}},
         "then": {"required": ["center", "radius"]}},
    ],
}


class SchemaError(ValueError):
    """Invalid body JSON; ``pointer`` is the JSON pointer of the offending value."""

    def __init__(self, message, pointer):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer


class VersionMismatch(ValueError):
    pass


def body_to_dict(body):
    if isinstance(body, BallBody):
        out = {"format_version": FORMAT_VERSION, "dim": body.dim, "kind": "ball",
               "center": body.center.tolist(), "radius": float(body.radius)}
    else:
        out = {"format_version": FORMAT_VERSION, "dim": body.dim, "kind": "polytope",
               "vertices": body.vertices.tolist()}
    if body.constructor is not None:
        out["constructor"] = body.constructor
    return out


def _pointer(path):
    return "/" + "/".join(str(p) for p in path)


def validate(doc):
    if isinstance(doc, dict) and "format_version" in doc and isinstance(doc["format_version"], int) \
            and doc["format_version"] != FORMAT_VERSION:
        raise VersionMismatch(f"format_version {doc['format_version']} is not supported "
                              f"(expected {FORMAT_VERSION})")
    err = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(BODY_SCHEMA).iter_errors(doc))
    if err is not None:
        raise SchemaError(err.message, _pointer(err.absolute_path))


def _exact_model(spec):
    from ..constructors import build
    try:
        return build(spec).exact
    except (GeometryError, KeyError, TypeError):
        return None


def body_from_dict(doc):
    validate(doc)
    dim = doc["dim"]
    spec = doc.get("constructor")
    try:
        if doc["kind"] == "ball":
            return BallBody(np.asarray(doc["center"], dtype=float), float(doc["radius"]), constructor=spec)
        v = np.asarray(doc["vertices"], dtype=float)
        if v.shape[1] != dim + 1:
            raise SchemaError(f"vertices must have {dim + 1} coordinates", "/vertices")
        exact = _exact_model(spec) if spec is not None else None
        return PolytopeBody(dim, v, constructor=spec, exact=exact)
    except GeometryError as exc:
        raise SchemaError(str(exc), "/vertices" if doc["kind"] == "polytope" else "/center") from exc


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=1)


def write_body(body, path):
    Path(path).write_text(dumps(body_to_dict(body)) + "\n")


def read_body(path):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc.msg}", "") from exc
    return body_from_dict(doc)


def body_io(path, direction, body=None):
    """Read (``direction='read'``) or write (``'write'``) a body file."""
    if direction == "read":
        return read_body(path)
    if direction == "write":
        if body is None:
            raise ValueError("writing needs a body")
        write_body(body, path)
        return Path(path)
    raise ValueError("direction must be 'read' or 'write'")
