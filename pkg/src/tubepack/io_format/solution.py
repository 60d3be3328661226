"""JSON solution documents.

Output is canonical: keys sorted, one fixed layout, coordinates written
with exactly two decimals, so equal solutions give byte-identical text.
Run time is deliberately left out of the document for that reason.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

from ..model import (BOXES, TUBES, BoxPlacement, ContainerSpec, Holder, Instance, Orientation,
                     PackedContainer, RingPlacement, Solution, BoxType, TubeType)
from .instance import format_instance

SCHEMA_VERSION = 1
# metric keys written with more precision than coordinates
_PLACES = {"fill_ratio": 4, "holder_fill_ratio": 4}
_VOLATILE_METRICS = ("wall_time",)


class SchemaError(ValueError):
    """The text is not a solution document this version understands."""


def instance_digest(inst: Instance) -> str:
    """sha256 of the canonical instance text."""
    return hashlib.sha256(format_instance(inst).encode()).hexdigest()


def _number_list(v) -> bool:
    return isinstance(v, (list, tuple)) and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)


def _flat(v) -> bool:
    return v is None or isinstance(v, (bool, str, int, float)) or _number_list(v)


def _emit(value: Any, places: int, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if value is None or isinstance(value, (bool, str)):
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        text = f"{value:.{places}f}"
        return "0." + "0" * places if text.lstrip("-").strip("0.") == "" else text
    if isinstance(value, dict):
        if not value:
            return "{}"
        if indent > 0 and all(_flat(v) for v in value.values()):
            # leaf records (rings, boxes, small maps) stay on one line
            return "{" + ", ".join(f"{json.dumps(str(k))}: {_emit(value[k], _PLACES.get(k, places), 0)}"
                                   for k in sorted(value)) + "}"
        items = [f"{inner}{json.dumps(str(k))}: {_emit(value[k], _PLACES.get(k, places), indent + 1)}"
                 for k in sorted(value)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if _number_list(value):
            return "[" + ", ".join(_emit(v, places, 0) for v in value) + "]"
        return "[\n" + ",\n".join(inner + _emit(v, places, indent + 1) for v in value) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(value).__name__}")


def _f(v) -> float:
    return float(v)


def _holder_doc(h: Holder) -> dict:
    doc = {"id": h.id, "kind": h.kind, "origin": [_f(v) for v in h.origin],
           "dims": [_f(v) for v in h.dims]}
    if h.kind == TUBES:
        doc["rings"] = [{"id": r.id, "type": r.tube_type, "x": _f(r.x), "y": _f(r.y),
                         "z": _f(r.z_offset), "parent": r.parent} for r in h.rings]
    else:
        doc["boxes"] = [{"type": p.box_type, "origin": [_f(p.x), _f(p.y), _f(p.z)],
                         "dims": [_f(v) for v in p.dims], "orientation": p.orientation.name}
                        for p in h.boxes]
    return doc


def _metrics_doc(metrics: dict) -> dict:
    out = {}
    for k, v in metrics.items():
        if k in _VOLATILE_METRICS:
            continue
        if isinstance(v, (list, tuple)):
            out[k] = [v_ if isinstance(v_, int) else _f(v_) for v_ in v]
        elif isinstance(v, bool) or not isinstance(v, (int, float)):
            out[k] = v
        else:
            out[k] = v if isinstance(v, int) else _f(v)
    return out


def solution_document(sol: Solution) -> dict:
    c = sol.container
    return {
        "schema_version": SCHEMA_VERSION,
        "instance_digest": sol.instance_digest,
        "container": {"width": _f(c.width), "height": _f(c.height), "depth": _f(c.depth)},
        "containers": [{"holders": [_holder_doc(h) for h in pc.holders]} for pc in sol.containers],
        "unpacked": {"tubes": dict(sol.unpacked_tubes), "boxes": dict(sol.unpacked_boxes)},
        "metrics": _metrics_doc(sol.metrics),
        "types": {
            "tubes": {t.id: _tube_doc(t) for t in sol.tube_types.values()},
            "boxes": {b.id: {"width": _f(b.width), "height": _f(b.height), "depth": _f(b.depth)}
                      for b in sol.box_types.values()},
        },
    }


def _tube_doc(t: TubeType) -> dict:
    doc = {"idiam": _f(t.idiam), "ediam": _f(t.ediam), "len": _f(t.len)}
    if t.socket_ediam is not None:
        doc["socket_ediam"] = _f(t.socket_ediam)
    return doc


def write_solution(sol: Solution) -> str:
    return _emit(solution_document(sol), 2, 0) + "\n"


# ------------------------------------------------------------------ reading

def _need(doc: dict, key: str, kind, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise SchemaError(f"{where}: missing field {key!r}")
    value = doc[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError(f"{where}.{key}: expected a number")
        return float(value)
    if kind is not None and not isinstance(value, kind):
        raise SchemaError(f"{where}.{key}: expected {kind.__name__}")
    return value


def _triple(doc, key, where) -> tuple[float, float, float]:
    v = _need(doc, key, list, where)
    if len(v) != 3 or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v):
        raise SchemaError(f"{where}.{key}: expected three numbers")
    return tuple(float(x) for x in v)


def _read_holder(doc, where) -> Holder:
    hid = _need(doc, "id", str, where)
    kind = _need(doc, "kind", str, where)
    origin = _triple(doc, "origin", where)
    dims = _triple(doc, "dims", where)
    if kind == TUBES:
        rings = []
        for i, r in enumerate(_need(doc, "rings", list, where)):
            w = f"{where}.rings[{i}]"
            if not isinstance(r, dict):
                raise SchemaError(f"{w}: expected an object")
            parent = r.get("parent")
            if "parent" not in r or (parent is not None and not isinstance(parent, str)):
                raise SchemaError(f"{w}: parent must be a ring id or null")
            rings.append(RingPlacement(_need(r, "id", str, w), _need(r, "type", str, w),
                                       _need(r, "x", float, w), _need(r, "y", float, w),
                                       _need(r, "z", float, w), parent))
        ids = [r.id for r in rings]
        if len(set(ids)) != len(ids):
            raise SchemaError(f"{where}: ring ids are not unique")
        known = set(ids)
        for r in rings:
            if r.parent is not None and r.parent not in known:
                raise SchemaError(f"{where}: ring {r.id} names unknown parent {r.parent!r}")
        return Holder(hid, kind, origin, dims, rings=rings)
    if kind == BOXES:
        boxes = []
        for i, b in enumerate(_need(doc, "boxes", list, where)):
            w = f"{where}.boxes[{i}]"
            if not isinstance(b, dict):
                raise SchemaError(f"{w}: expected an object")
            try:
                o = Orientation.from_name(_need(b, "orientation", str, w))
            except ValueError as exc:
                raise SchemaError(f"{w}: {exc}") from None
            x, y, z = _triple(b, "origin", w)
            boxes.append(BoxPlacement(_need(b, "type", str, w), x, y, z, o, _triple(b, "dims", w)))
        return Holder(hid, kind, origin, dims, boxes=boxes)
    raise SchemaError(f"{where}: unknown holder kind {kind!r}")


def _counts(doc, where) -> dict[str, int]:
    if not isinstance(doc, dict) or any(isinstance(v, bool) or not isinstance(v, int) for v in doc.values()):
        raise SchemaError(f"{where}: expected a map of integer counts")
    return dict(doc)


def read_solution(text: str) -> Solution:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    version = _need(doc, "schema_version", int, "solution")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version!r}")
    cdoc = _need(doc, "container", dict, "solution")
    try:
        container = ContainerSpec(_need(cdoc, "width", float, "container"),
                                  _need(cdoc, "height", float, "container"),
                                  _need(cdoc, "depth", float, "container"))
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    containers = []
    for ci, c in enumerate(_need(doc, "containers", list, "solution"), start=1):
        if not isinstance(c, dict):
            raise SchemaError(f"containers[{ci}]: expected an object")
        hs = _need(c, "holders", list, f"containers[{ci}]")
        holders = []
        for i, h in enumerate(hs):
            if not isinstance(h, dict):
                raise SchemaError(f"C{ci}.holders[{i}]: expected an object")
            holders.append(_read_holder(h, f"C{ci}.holders[{i}]"))
        containers.append(PackedContainer(holders))
    types = _need(doc, "types", dict, "solution")
    tube_types, box_types = {}, {}
    try:
        for k, t in _need(types, "tubes", dict, "types").items():
            w = f"types.tubes.{k}"
            sock = t.get("socket_ediam") if isinstance(t, dict) else None
            tube_types[k] = TubeType(k, _need(t, "idiam", float, w), _need(t, "ediam", float, w),
                                     _need(t, "len", float, w), 0,
                                     None if sock is None else _need(t, "socket_ediam", float, w))
        for k, b in _need(types, "boxes", dict, "types").items():
            w = f"types.boxes.{k}"
            box_types[k] = BoxType(k, _need(b, "width", float, w), _need(b, "height", float, w),
                                   _need(b, "depth", float, w))
    except ValueError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(str(exc)) from None
    unpacked = _need(doc, "unpacked", dict, "solution")
    metrics = _need(doc, "metrics", dict, "solution")
    return Solution(container, containers,
                    _counts(_need(unpacked, "tubes", dict, "unpacked"), "unpacked.tubes"),
                    _counts(_need(unpacked, "boxes", dict, "unpacked"), "unpacked.boxes"),
                    dict(metrics), _need(doc, "instance_digest", str, "solution"),
                    tube_types, box_types)
