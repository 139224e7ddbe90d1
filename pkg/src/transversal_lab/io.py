"""Canonical JSON encoding of bodies, flats, family files and reports.

Canonical form: sorted keys, no whitespace, floats written with 17
significant digits.  Parsing and re-serializing a canonical document gives
back the same bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    AxisBox,
    Ball,
    CompoundBody,
    ConvexPolygon2,
    Interval,
    KFlat,
    OrientedRect2,
    Polyline,
    Polytope,
    Triangle2,
)

FORMAT_VERSION = "1"


class SchemaError(ValueError):
    pass


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return "%.17g" % x


def canonical_dumps(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=True)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ",".join(json.dumps(k) + ":" + canonical_dumps(v) for k, v in items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(canonical_dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _fl(v):
    return [float(x) for x in v]


def body_to_json(S) -> dict:
    if isinstance(S, Interval):
        return {"type": "interval", "lo": S.lo, "hi": S.hi}
    if isinstance(S, AxisBox):
        return {"type": "box", "lo": _fl(S.lo), "hi": _fl(S.hi)}
    if isinstance(S, Ball):
        return {"type": "ball", "center": _fl(S.center), "radius": S.radius}
    if isinstance(S, OrientedRect2):
        return {"type": "orect", "center": _fl(S.center), "u": _fl(S.axis_u), "hl": S.half_len, "hw": S.half_wid}
    if isinstance(S, Triangle2):
        return {"type": "triangle", "vertices": [_fl(S.v1), _fl(S.v2), _fl(S.v3)]}
    if isinstance(S, ConvexPolygon2):
        return {"type": "polygon", "vertices": [_fl(v) for v in S.vertices_ccw]}
    if isinstance(S, Polytope):
        return {"type": "polytope", "points": [_fl(v) for v in S.points]}
    if isinstance(S, Polyline):
        return {"type": "polyline", "vertices": [_fl(v) for v in S.vertices_seq]}
    if isinstance(S, CompoundBody):
        return {"type": "compound", "pieces": [body_to_json(p) for p in S.parts]}
    raise TypeError(f"cannot encode body {type(S).__name__}")


def body_from_json(rec: dict):
    try:
        t = rec["type"]
        if t == "interval":
            return Interval(rec["lo"], rec["hi"])
        if t == "box":
            return AxisBox(rec["lo"], rec["hi"])
        if t == "ball":
            return Ball(rec["center"], rec["radius"])
        if t == "orect":
            return OrientedRect2(rec["center"], rec["u"], rec["hl"], rec["hw"])
        if t == "triangle":
            return Triangle2(*rec["vertices"])
        if t == "polygon":
            return ConvexPolygon2(rec["vertices"])
        if t == "polytope":
            return Polytope(rec["points"])
        if t == "polyline":
            return Polyline(rec["vertices"])
        if t == "compound":
            return CompoundBody(tuple(body_from_json(p) for p in rec["pieces"]))
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed body record {rec!r}") from exc
    raise SchemaError(f"unknown body type {rec.get('type')!r}")


def flat_to_json(K: KFlat) -> dict:
    return {"type": "flat", "base": _fl(K.base), "basis": [_fl(b) for b in K.basis]}


def flat_from_json(rec: dict) -> KFlat:
    try:
        return KFlat(rec["base"], rec.get("basis", []))
    except (KeyError, TypeError) as exc:
        raise SchemaError("malformed flat record") from exc


@dataclass
class FamilyFile:
    dim: int
    bodies: list
    generator: dict | None = None
    labels: list | None = None  # per body: [family, member], 1-based
    extra: dict = field(default_factory=dict)
    version: str = FORMAT_VERSION

    def to_json(self) -> dict:
        out = {"version": self.version, "dim": self.dim, "bodies": [body_to_json(b) for b in self.bodies]}
        if self.generator is not None:
            out["generator"] = self.generator
        if self.labels is not None:
            out["labels"] = [list(l) for l in self.labels]
        out.update(self.extra)
        return out

    def families(self) -> list[list]:
        """Group bodies by the family label (or one family per body when unlabeled)."""
        if self.labels is None:
            return [[b] for b in self.bodies]
        groups: dict[int, list] = {}
        for (f, _), b in zip(self.labels, self.bodies):
            groups.setdefault(int(f), []).append(b)
        return [groups[f] for f in sorted(groups)]

    def family_indices(self) -> list[int]:
        if self.labels is None:
            return list(range(1, len(self.bodies) + 1))
        return sorted({int(f) for f, _ in self.labels})


def family_from_json(doc: dict) -> FamilyFile:
    if not isinstance(doc, dict) or "bodies" not in doc or "dim" not in doc:
        raise SchemaError("family file needs 'dim' and 'bodies'")
    bodies = [body_from_json(r) for r in doc["bodies"]]
    dim = int(doc["dim"])
    if any(b.dim != dim for b in bodies):
        raise SchemaError("body dimension disagrees with the file's 'dim'")
    labels = doc.get("labels")
    if labels is not None and len(labels) != len(bodies):
        raise SchemaError("labels and bodies differ in length")
    known = {"version", "dim", "bodies", "generator", "labels"}
    extra = {k: v for k, v in doc.items() if k not in known}
    return FamilyFile(dim, bodies, doc.get("generator"), labels, extra, str(doc.get("version", FORMAT_VERSION)))


def dumps_family(F: FamilyFile) -> str:
    return canonical_dumps(F.to_json()) + "\n"


def loads_family(text: str) -> FamilyFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return family_from_json(doc)


def write_text(path, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def read_text(path) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()
