"""Independent feasibility checks for a solution against its instance.

Nothing here calls the packers: containment, overlap and stacking rules are
recomputed from the stored coordinates alone.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .model import BOXES, TUBES, Holder, Instance, Orientation, Solution

DEFAULT_TOLERANCE = 1e-4


class ViolationCode(str, enum.Enum):
    OVERLAP = "Overlap"
    OUT_OF_BOUNDS = "OutOfBounds"
    PROTRUSION = "Protrusion"
    TUBE_ABOVE_SHORTER = "TubeAboveShorter"
    BOX_BELOW_TUBE = "BoxBelowTube"
    TELESCOPE_CLEARANCE = "TelescopeClearance"
    COUNT_MISMATCH = "CountMismatch"
    WIDTH_RULE = "WidthRule"
    DEPTH_MISMATCH = "DepthMismatch"


@dataclass(frozen=True)
class Violation:
    code: ViolationCode
    subject: str
    detail: str
    magnitude: float = 0.0


class MalformedSolution(ValueError):
    """The solution refers to something that does not exist."""


def _outer(t) -> float:
    return t.socket_ediam if t.socket_ediam is not None else t.ediam


def _gap(lo1, hi1, lo2, hi2) -> float:
    """Length of the overlap of two intervals (negative when apart)."""
    return min(hi1, hi2) - max(lo1, lo2)


class _Checker:
    def __init__(self, instance: Instance, solution: Solution, tol: float):
        self.inst = instance
        self.sol = solution
        self.tol = tol
        self.tubes = {t.id: t for t in instance.tubes}
        self.boxes = {b.id: b for b in instance.boxes}
        self.out: list[Violation] = []

    def add(self, code, subject, detail, magnitude=0.0):
        self.out.append(Violation(code, subject, detail, abs(float(magnitude))))

    # -------------------------------------------------------------- holders
    def holders(self, ci: int, holders: list[Holder]):
        c = self.sol.container
        tol = self.tol
        ids = set()
        for h in holders:
            tag = f"C{ci}:{h.id}"
            if h.id in ids:
                raise MalformedSolution(f"holder id {tag} repeated")
            ids.add(h.id)
            if h.kind not in (TUBES, BOXES):
                raise MalformedSolution(f"holder {tag} has unknown kind {h.kind!r}")
            if abs(h.dims[0] - c.width) > tol or abs(h.origin[0]) > tol:
                self.add(ViolationCode.WIDTH_RULE, tag,
                         f"holder spans x [{h.origin[0]}, {h.origin[0] + h.dims[0]}], not the full width {c.width}",
                         max(abs(h.dims[0] - c.width), abs(h.origin[0])))
            for k, size in enumerate((c.width, c.height, c.depth)):
                lo, hi = h.origin[k], h.origin[k] + h.dims[k]
                excess = max(-lo, hi - size, -h.dims[k])
                if excess > tol:
                    self.add(ViolationCode.OUT_OF_BOUNDS, tag, f"holder leaves the container on axis {'xyz'[k]}",
                             excess)
        for a, b in combinations(holders, 2):
            pen = min(_gap(a.origin[k], a.origin[k] + a.dims[k], b.origin[k], b.origin[k] + b.dims[k])
                      for k in range(3))
            if pen > tol:
                self.add(ViolationCode.OVERLAP, f"C{ci}:{a.id},{b.id}", "holders intersect", pen)
        self.stacking(ci, holders)

    def stacking(self, ci: int, holders: list[Holder]):
        tol = self.tol
        for up in holders:
            y0 = up.origin[1]
            z0, z1 = up.origin[2], up.origin[2] + up.dims[2]
            # everything strictly below and sharing some depth range
            below = [lo for lo in holders if lo is not up
                     and lo.origin[1] + lo.dims[1] <= y0 + tol
                     and _gap(z0, z1, lo.origin[2], lo.origin[2] + lo.dims[2]) > tol]
            for lo in below:
                pair = f"C{ci}:{up.id}/{lo.id}"
                if up.kind == TUBES and lo.kind == BOXES:
                    self.add(ViolationCode.BOX_BELOW_TUBE, pair,
                             f"tube holder {up.id} lies above box holder {lo.id}")
                if up.kind == TUBES and lo.kind == TUBES:
                    ul, ll = self.tube_length(up), self.tube_length(lo)
                    if ul is not None and ll is not None and ul > ll + tol:
                        self.add(ViolationCode.TUBE_ABOVE_SHORTER, pair,
                                 f"tubes of length {ul} above tubes of length {ll}", ul - ll)
            if y0 <= tol:
                continue
            # the holders directly underneath must carry the whole depth range
            support = sorted((max(z0, lo.origin[2]), min(z1, lo.origin[2] + lo.dims[2]))
                             for lo in below if abs(lo.origin[1] + lo.dims[1] - y0) <= tol)
            uncovered, reach = 0.0, z0
            for s0, s1 in support:
                if s0 > reach:
                    uncovered += s0 - reach
                reach = max(reach, s1)
            uncovered += max(0.0, z1 - reach)
            if uncovered > tol:
                self.add(ViolationCode.PROTRUSION, f"C{ci}:{up.id}",
                         f"{uncovered:.2f} mm of depth has nothing directly underneath", uncovered)

    def tube_length(self, h: Holder) -> Optional[float]:
        tops = [r for r in h.rings if r.parent is None]
        return max((self.tubes[r.tube_type].len for r in tops), default=None)

    def references(self, ci: int, h: Holder):
        """Unknown item types make every later check meaningless."""
        for r in h.rings:
            if r.tube_type not in self.tubes:
                raise MalformedSolution(f"C{ci}:{h.id}: ring {r.id} has unknown tube type {r.tube_type!r}")
        for p in h.boxes:
            if p.box_type not in self.boxes:
                raise MalformedSolution(f"C{ci}:{h.id}: unknown box type {p.box_type!r}")

    # ---------------------------------------------------------------- rings
    def rings(self, ci: int, h: Holder):
        tol = self.tol
        tag = f"C{ci}:{h.id}"
        byid = {}
        for r in h.rings:
            if r.tube_type not in self.tubes:
                raise MalformedSolution(f"{tag}: ring {r.id} has unknown tube type {r.tube_type!r}")
            if r.id in byid:
                raise MalformedSolution(f"{tag}: ring id {r.id} repeated")
            byid[r.id] = r
        for r in h.rings:
            if r.parent is not None and r.parent not in byid:
                raise MalformedSolution(f"{tag}: ring {r.id} names missing parent {r.parent!r}")
        w, ht, dp = h.dims
        tops = [r for r in h.rings if r.parent is None]
        for r in h.rings:
            t = self.tubes[r.tube_type]
            rad = _outer(t) / 2
            sub = f"{tag}:{r.id}"
            if r.z_offset < -tol or r.z_offset + t.len > dp + tol:
                self.add(ViolationCode.OUT_OF_BOUNDS, sub, "tube runs past the holder depth",
                         max(-r.z_offset, r.z_offset + t.len - dp))
            if r.parent is None:
                excess = max(rad - r.x, r.x + rad - w, rad - r.y, r.y + rad - ht)
                if excess > tol:
                    self.add(ViolationCode.OUT_OF_BOUNDS, sub, "ring leaves the holder section", excess)
                if abs(t.len - dp) > tol:
                    self.add(ViolationCode.DEPTH_MISMATCH, sub,
                             f"tube length {t.len} in a holder of depth {dp}", abs(t.len - dp))
            else:
                p = byid[r.parent]
                pt = self.tubes[p.tube_type]
                slack = math.hypot(r.x - p.x, r.y - p.y) + rad - pt.idiam / 2
                if slack > tol:
                    self.add(ViolationCode.TELESCOPE_CLEARANCE, sub,
                             f"does not fit the bore of {p.id}", slack)
                if r.z_offset < p.z_offset - tol or r.z_offset + t.len > p.z_offset + pt.len + tol:
                    self.add(ViolationCode.TELESCOPE_CLEARANCE, sub,
                             f"runs outside the length of {p.id}",
                             max(p.z_offset - r.z_offset, r.z_offset + t.len - p.z_offset - pt.len))
        self.ring_pairs(tag, tops)
        kids: dict[str, list] = {}
        for r in h.rings:
            if r.parent is not None:
                kids.setdefault(r.parent, []).append(r)
        for group in kids.values():
            self.ring_pairs(tag, group, along_depth=True)

    def ring_pairs(self, tag, rings, along_depth=False):
        tol = self.tol
        for a, b in combinations(rings, 2):
            ta, tb = self.tubes[a.tube_type], self.tubes[b.tube_type]
            if along_depth and _gap(a.z_offset, a.z_offset + ta.len, b.z_offset, b.z_offset + tb.len) <= tol:
                continue
            pen = (_outer(ta) + _outer(tb)) / 2 - math.hypot(a.x - b.x, a.y - b.y)
            if pen > tol:
                self.add(ViolationCode.OVERLAP, f"{tag}:{a.id},{b.id}", "rings intersect", pen)

    # ---------------------------------------------------------------- boxes
    def box_holder(self, ci: int, h: Holder):
        tol = self.tol
        tag = f"C{ci}:{h.id}"
        spans = []
        for i, p in enumerate(h.boxes):
            if p.box_type not in self.boxes:
                raise MalformedSolution(f"{tag}: unknown box type {p.box_type!r}")
            b = self.boxes[p.box_type]
            o = p.orientation if isinstance(p.orientation, Orientation) else Orientation.from_name(p.orientation)
            size = o.apply((b.width, b.height, b.depth))
            if any(abs(size[k] - p.dims[k]) > tol for k in range(3)):
                raise MalformedSolution(f"{tag}: box {i} dims {p.dims} disagree with orientation {o.name}")
            lo = (p.x, p.y, p.z)
            hi = tuple(lo[k] + size[k] for k in range(3))
            excess = max(max(-lo[k], hi[k] - h.dims[k]) for k in range(3))
            if excess > tol:
                self.add(ViolationCode.OUT_OF_BOUNDS, f"{tag}:box{i}", "box leaves the holder", excess)
            spans.append((i, lo, hi))
        for (i, alo, ahi), (j, blo, bhi) in combinations(spans, 2):
            pen = min(_gap(alo[k], ahi[k], blo[k], bhi[k]) for k in range(3))
            if pen > tol:
                self.add(ViolationCode.OVERLAP, f"{tag}:box{i},box{j}", "boxes intersect", pen)

    # --------------------------------------------------------------- counts
    def counts(self):
        packed_t = {k: 0 for k in self.tubes}
        packed_b = {k: 0 for k in self.boxes}
        for pc in self.sol.containers:
            for h in pc.holders:
                for r in h.rings:
                    packed_t[r.tube_type] += 1
                for p in h.boxes:
                    packed_b[p.box_type] += 1
        for kind, catalog, packed, rest in (("tube", self.tubes, packed_t, self.sol.unpacked_tubes),
                                            ("box", self.boxes, packed_b, self.sol.unpacked_boxes)):
            for k in rest:
                if k not in catalog:
                    raise MalformedSolution(f"unpacked {kind} type {k!r} is not in the instance")
            for k, item in catalog.items():
                got = packed[k] + rest.get(k, 0)
                if got != item.count or rest.get(k, 0) < 0:
                    self.add(ViolationCode.COUNT_MISMATCH, f"{kind}:{k}",
                             f"{packed[k]} packed + {rest.get(k, 0)} unpacked != {item.count} ordered",
                             abs(got - item.count))

    def run(self) -> list[Violation]:
        if self.sol.container != self.inst.container:
            c1, c2 = self.sol.container, self.inst.container
            self.add(ViolationCode.OUT_OF_BOUNDS, "container",
                     f"solution container {c1} differs from the instance's {c2}")
        for ci, pc in enumerate(self.sol.containers, start=1):
            for h in pc.holders:
                self.references(ci, h)
        for ci, pc in enumerate(self.sol.containers, start=1):
            self.holders(ci, pc.holders)
            for h in pc.holders:
                if h.kind == TUBES:
                    if h.boxes:
                        raise MalformedSolution(f"tube holder C{ci}:{h.id} lists boxes")
                    self.rings(ci, h)
                else:
                    if h.rings:
                        raise MalformedSolution(f"box holder C{ci}:{h.id} lists rings")
                    self.box_holder(ci, h)
        self.counts()
        return self.out


def validate(instance: Instance, solution: Solution, tolerance: float = DEFAULT_TOLERANCE) -> list[Violation]:
    """Every rule the solution breaks, in a stable order; empty when feasible.

    Tubes always run along the depth axis because the format has no way to
    say otherwise, so that rule needs no check.
    """
    return _Checker(instance, solution, tolerance).run()
