"""Recursive division of containers into holders.

Each container is cut into transversal slices by tube length.  A slice
becomes a tube holder; the space left above it is filled recursively, and
once no tube fits the remaining depth a box holder takes the rest.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .boxpack import pack_b1, pack_b2
from .budget import Budget, split_budget
from .circlepack import CrossSection, pack_t2, snap_rings, telescope_fill, top_level
from .io_format.solution import instance_digest
from .model import (BOXES, TUBES, BoxPlacement, BoxType, ContainerSpec, Holder, Instance,
                    PackedContainer, Solution, TubeType, canonical_box_order,
                    canonical_tube_order, ceil_to_grid, effective_ediam, orientations_of, snap,
                    tube_volume)

# every radius is inflated by this much while packing so that rounding
# centres to the 0.01 mm grid can never create an overlap
RING_MARGIN = 0.01
DEFAULT_SECONDS = 30.0
# quota of the B1 attempt that decides between B1 and B2
PROBE_NODES = 2_500

__all__ = ["FillFrame", "Unpackable", "solve", "fill", "select_slice_length",
           "Budget", "split_budget", "RING_MARGIN"]


class Unpackable(Exception):
    """Some item does not fit an empty container in any allowed orientation."""


@dataclass
class FillFrame:
    """A region of one container still to be filled: width is always the
    container width; ``origin`` is its rear-bottom-left corner."""

    depth: float
    width: float
    height: float
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)
    d: float = 0.0
    parent: Optional[str] = None


@dataclass
class _Run:
    """State shared by one solve: pending counts, the budget and settings."""

    tubes: dict[str, TubeType]
    boxes: dict[str, BoxType]
    tube_left: dict[str, int]
    box_left: dict[str, int]
    budget: Budget
    seed: int
    noise: float
    workers: int
    upright_only: bool
    holders: list[Holder] = field(default_factory=list)
    calls: int = 0

    def pending(self) -> int:
        return sum(self.tube_left.values()) + sum(self.box_left.values())

    def pending_tubes(self) -> list[TubeType]:
        return [t.with_count(self.tube_left[t.id]) for t in self.tubes.values()
                if self.tube_left[t.id] > 0]

    def pending_boxes(self) -> list[BoxType]:
        return [b.with_count(self.box_left[b.id]) for b in self.boxes.values()
                if self.box_left[b.id] > 0]

    def next_id(self) -> str:
        return f"H{len(self.holders) + 1}"

    def next_seed(self) -> int:
        # distinct, reproducible seed block per packing call
        self.calls += 1
        return self.seed + 100_003 * self.calls


def _tube_fits_section(t: TubeType, width: float, height: float) -> bool:
    return effective_ediam(t) + 2 * RING_MARGIN <= min(width, height) + 1e-9


def _box_fits(b: BoxType, dims, upright_only=False) -> bool:
    return any(all(o[k] <= dims[k] + 1e-9 for k in range(3))
               for _, o in orientations_of(b, upright_only))


def select_slice_length(tubes, remaining_depth: float) -> Optional[float]:
    """Longest tube length not exceeding ``remaining_depth``, or None."""
    lengths = [t.len for t in tubes if t.count > 0 and t.len <= remaining_depth + 1e-9]
    return max(lengths) if lengths else None


def _something_fits(run: _Run, width: float, height: float, depth: float) -> bool:
    if height <= 0:
        return False
    if any(t.len <= depth + 1e-9 and _tube_fits_section(t, width, height)
           for t in run.pending_tubes()):
        return True
    return any(_box_fits(b, (width, height, depth), run.upright_only) for b in run.pending_boxes())


def _sub_budget(run: _Run, call_items: int) -> Budget:
    return split_budget(run.budget, run.pending(), call_items)


def _tube_holder(run: _Run, frame: FillFrame, length: float, batch: list[TubeType]) -> Holder:
    """Pack the tubes of one length into a W x H x length slice, telescope
    shorter tubes into them and shrink the height when everything fitted."""
    cs = CrossSection(frame.width, frame.height)
    sub = _sub_budget(run, sum(t.count for t in batch))
    out = pack_t2(batch, cs, sub, seed=run.next_seed(), noise=run.noise,
                  margin=RING_MARGIN, workers=run.workers)
    run.budget.charge(sub.used)
    rings = snap_rings(top_level(out.rings))
    placed = {t.id: 0 for t in batch}
    for r in rings:
        placed[r.tube_type] += 1
    # leftovers of this length first, as the construction itself did, then shorter ones
    same = [t.with_count(t.count - placed[t.id]) for t in batch if t.count > placed[t.id]]
    if same and rings:
        rings, _ = telescope_fill(rings, same, run.tubes)
    complete = len(rings) == sum(t.count for t in batch)
    shorter = [t for t in canonical_tube_order(run.pending_tubes()) if t.len < length]
    for r in rings:
        run.tube_left[r.tube_type] -= 1
    if shorter and rings:
        before = len(rings)
        rings, _ = telescope_fill(rings, shorter, run.tubes)
        for r in rings[before:]:
            run.tube_left[r.tube_type] -= 1
    rings = snap_rings(rings)
    height = frame.height
    if complete:
        used = max(r.y + run.tubes[r.tube_type].radius for r in rings if r.parent is None)
        height = min(frame.height, ceil_to_grid(used))
    x0, y0, z0 = frame.origin
    return Holder(run.next_id(), TUBES, (x0, y0, snap(z0 + frame.d)),
                  (frame.width, height, length), rings=rings)


def _box_holder(run: _Run, frame: FillFrame, boxes: list[BoxType]) -> Optional[Holder]:
    depth = snap(frame.depth - frame.d)
    dims = (frame.width, frame.height, depth)
    total = sum(b.count for b in boxes)
    sub = _sub_budget(run, total)
    probe = Budget.nodes(min(sub.remaining, PROBE_NODES))
    out = pack_b1(boxes, dims, probe, upright_only=run.upright_only)
    sub.charge(probe.used)
    if not out.incomplete:
        out = pack_b2(boxes, dims, sub, upright_only=run.upright_only)
    elif not sub.exhausted:
        out = pack_b1(boxes, dims, sub, upright_only=run.upright_only)
    run.budget.charge(sub.used)
    if not out.placements:
        return None
    placements = [BoxPlacement(p.box_type, snap(p.x), snap(p.y), snap(p.z), p.orientation,
                               tuple(snap(v) for v in p.dims))
                  for p in sorted(out.placements, key=lambda p: (p.z, p.y, p.x))]
    for p in placements:
        run.box_left[p.box_type] -= 1
    x0, y0, z0 = frame.origin
    return Holder(run.next_id(), BOXES, (x0, y0, snap(z0 + frame.d)), dims, boxes=placements)


def fill(frame: FillFrame, run: _Run) -> None:
    """Fill ``frame`` slice by slice, recursing into the space above each
    tube holder that did not take the full height."""
    while True:
        room = frame.depth - frame.d
        usable = [t for t in run.pending_tubes()
                  if t.len <= room + 1e-9 and _tube_fits_section(t, frame.width, frame.height)]
        if not usable:
            boxes = [b for b in canonical_box_order(run.pending_boxes())
                     if min(b.dims) <= room + 1e-9]
            if boxes:
                h = _box_holder(run, frame, boxes)
                if h is not None:
                    run.holders.append(h)
            return
        length = select_slice_length(usable, room)
        batch = [t for t in canonical_tube_order(usable) if t.len == length]
        h = _tube_holder(run, frame, length, batch)
        run.holders.append(h)
        a = h.dims[1]
        above = snap(frame.height - a)
        if above > 0 and _something_fits(run, frame.width, above, length):
            x0, y0, _ = frame.origin
            fill(FillFrame(length, frame.width, above, (x0, snap(y0 + a), h.origin[2]),
                           parent=h.id), run)
        frame.d = snap(frame.d + length)


def _check_packable(inst: Instance, c: ContainerSpec, upright_only: bool) -> None:
    for t in inst.tubes:
        if t.count > 0 and (t.len > c.depth + 1e-9 or not _tube_fits_section(t, c.width, c.height)):
            raise Unpackable(f"tube {t.id} does not fit an empty container")
    for b in inst.boxes:
        if b.count > 0 and not _box_fits(b, (c.width, c.height, c.depth), upright_only):
            raise Unpackable(f"box {b.id} does not fit an empty container")


def container_metrics(container: ContainerSpec, packed: PackedContainer,
                      tubes: dict[str, TubeType], boxes: dict[str, BoxType]) -> tuple[float, float]:
    """(fill ratio, holder fill ratio) of one container.

    The fill ratio counts the outer envelope of top-level tubes (telescoped
    ones sit inside it) plus box volumes.  The holder ratio counts tube
    holders whole and, for box holders, the bounding box of their content.
    """
    vol = container.volume
    items = 0.0
    bounding = 0.0
    for h in packed.holders:
        if h.kind == TUBES:
            items += sum(tube_volume(tubes[r.tube_type]) for r in h.rings if r.parent is None)
            bounding += h.volume
        else:
            items += sum(p.dims[0] * p.dims[1] * p.dims[2] for p in h.boxes)
            if h.boxes:
                bounding += h.dims[0] * max(p.far[1] for p in h.boxes) * max(p.far[2] for p in h.boxes)
    return items / vol, bounding / vol


def solve(instance: Instance, container: Optional[ContainerSpec] = None,
          budget: Optional[Budget] = None, seed: int = 0, noise: float = 0.2,
          workers: int = 1, wallclock: bool = False, time_limit: float = DEFAULT_SECONDS,
          upright_only: bool = False) -> Solution:
    """Pack the whole instance, opening containers until nothing is left.

    Without an explicit ``budget`` the ``time_limit`` is converted to a
    node quota (or a real deadline when ``wallclock`` is set).
    """
    start = time.perf_counter()
    c = container or instance.container
    _check_packable(instance, c, upright_only)
    if budget is None:
        budget = Budget.from_seconds(time_limit, wallclock=wallclock)
    run = _Run({t.id: t for t in instance.tubes}, {b.id: b for b in instance.boxes},
               {t.id: t.count for t in instance.tubes}, {b.id: b.count for b in instance.boxes},
               budget, seed, noise, workers, upright_only)
    containers: list[PackedContainer] = []
    while run.pending() > 0:
        run.holders = []
        before = run.pending()
        fill(FillFrame(c.depth, c.width, c.height), run)
        if run.pending() == before:
            raise Unpackable("no remaining item could be placed in an empty container")
        containers.append(PackedContainer(run.holders))
    fills = [container_metrics(c, pc, run.tubes, run.boxes) for pc in containers]
    metrics = {
        "containers_used": len(containers),
        "fill_ratio": [f for f, _ in fills],
        "holder_fill_ratio": [h for _, h in fills],
        "extra_value": 0.0,
        "nodes_used": budget.used,
        "wall_time": time.perf_counter() - start,
    }
    return Solution(c, containers, {k: v for k, v in run.tube_left.items() if v},
                    {k: v for k, v in run.box_left.items() if v}, metrics,
                    instance_digest(instance),
                    {t.id: t.with_count(0) for t in instance.tubes},
                    {b.id: b.with_count(0) for b in instance.boxes})
