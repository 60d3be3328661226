"""Corner-based placement of boxes inside a box holder.

Holder coordinates: x along the width, y up, z along the depth; the origin
is the bottom, rear, left corner.  A corner carries a signature, the octant
into which a box anchored there grows.  The packers only ever create
(+, +, +) corners, but ``try_place`` honours any signature.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .budget import Budget
from .model import (ORIENTATIONS, UPRIGHT_ORIENTATIONS, BoxPlacement, BoxType, Orientation,
                    canonical_box_order)

EPS = 1e-6
PLUS = (1, 1, 1)
# cost in nodes of one best-corner evaluation: a fixed part plus
# C corners x K orientations x (N placed + 1) pair tests / NODE_DIVISOR
NODE_BASE = 20
NODE_DIVISOR = 100


@dataclass(frozen=True)
class Corner:
    point: tuple[float, float, float]
    signature: tuple[int, int, int] = PLUS


@dataclass
class BoxPackOutcome:
    placements: list[BoxPlacement]
    used_depth: float
    used_height: float
    counts_by_type: tuple[int, ...] = ()
    type_ids: tuple[str, ...] = ()
    incomplete: bool = False
    nodes: int = 0
    leaves: int = 0

    @property
    def packed_count(self) -> int:
        return len(self.placements)

    @property
    def used_width(self) -> float:
        return max((p.far[0] for p in self.placements), default=0.0)


def initial_corners(dims: Sequence[float]) -> list[Corner]:
    if min(dims) <= 0:
        raise ValueError("holder dimensions must be positive")
    return [Corner((0.0, 0.0, 0.0), PLUS)]


def _box_of(p: BoxPlacement):
    return (p.x, p.y, p.z) + p.far


def _overlaps(a, b) -> bool:
    return all(min(a[k + 3], b[k + 3]) - max(a[k], b[k]) > EPS for k in range(3))


def try_place(b: BoxType, o: Orientation, c: Corner, placed: Sequence[BoxPlacement],
              dims: Sequence[float]) -> Optional[BoxPlacement]:
    """Anchor ``b`` in orientation ``o`` at ``c``, growing along its signature."""
    size = o.apply(b.dims)
    lo = [c.point[k] if c.signature[k] > 0 else c.point[k] - size[k] for k in range(3)]
    hi = [lo[k] + size[k] for k in range(3)]
    if any(lo[k] < -EPS or hi[k] > dims[k] + EPS for k in range(3)):
        return None
    cand = tuple(lo) + tuple(hi)
    if any(_overlaps(cand, _box_of(p)) for p in placed):
        return None
    return BoxPlacement(b.id, lo[0], lo[1], lo[2], o, size)


class _State:
    """Placed boxes as an (N, 6) array of [x0 y0 z0 x1 y1 z1] plus the corner list."""

    def __init__(self, dims):
        self.dims = np.asarray(dims, dtype=float)
        self.arr = np.zeros((0, 6))
        self.placements: list[BoxPlacement] = []
        self.corners: list[Corner] = initial_corners(dims)

    def copy(self) -> "_State":
        s = _State.__new__(_State)
        s.dims = self.dims
        s.arr = self.arr
        s.placements = list(self.placements)
        s.corners = list(self.corners)
        return s

    @classmethod
    def from_placements(cls, placed, dims, corners=None):
        s = cls(dims)
        s.placements = list(placed)
        if placed:
            s.arr = np.array([_box_of(p) for p in placed], dtype=float)
        if corners is not None:
            s.corners = list(corners)
        return s

    def extents(self):
        if len(self.arr) == 0:
            return (0.0, 0.0, 0.0)
        m = self.arr[:, 3:].max(axis=0)
        return (float(m[0]), float(m[1]), float(m[2]))

    def place(self, p: BoxPlacement) -> None:
        self.placements.append(p)
        self.arr = np.vstack([self.arr, np.array([_box_of(p)])])
        self.corners = _update(self.corners, p, self.arr, self.dims)


def _supported(lo, hi, arr):
    """Mask of candidate boxes touching a wall or a placed box face, with
    positive contact area, on each of their -x, -y, -z sides."""
    ok = np.ones(len(lo), dtype=bool)
    for ax in range(3):
        at_wall = lo[:, ax] <= EPS
        if len(arr) == 0:
            ok &= at_wall
            continue
        o1, o2 = [k for k in range(3) if k != ax]
        need = np.nonzero(ok & ~at_wall)[0]
        if len(need) == 0:
            continue
        l, h = lo[need][:, None, :], hi[need][:, None, :]
        flush = np.abs(arr[None, :, ax + 3] - l[:, :, ax]) <= EPS
        a1 = np.minimum(h[:, :, o1], arr[None, :, o1 + 3]) - np.maximum(l[:, :, o1], arr[None, :, o1]) > EPS
        a2 = np.minimum(h[:, :, o2], arr[None, :, o2 + 3]) - np.maximum(l[:, :, o2], arr[None, :, o2]) > EPS
        touch = (flush & a1 & a2).any(axis=1)
        ok[need[~touch]] = False
    return ok


def _best(b: BoxType, state: _State, options: Sequence[Orientation], corners=None):
    """Index into corners x options of the best pair, or None, plus the
    number of pairs examined.  Only (+, +, +) corners are evaluated."""
    corners = state.corners if corners is None else corners
    if not corners or not options:
        return None, 0
    pts = np.array([c.point for c in corners], dtype=float)            # (C, 3)
    sizes = np.array([o.apply(b.dims) for o in options], dtype=float)  # (K, 3)
    n_c, n_k = len(pts), len(sizes)
    lo = np.repeat(pts, n_k, axis=0)                                   # (C*K, 3)
    hi = lo + np.tile(sizes, (n_c, 1))
    ok = (hi <= state.dims + EPS).all(axis=1)
    arr = state.arr
    idx = np.nonzero(ok)[0]
    if len(arr) and len(idx):
        keep = []
        for start in range(0, len(idx), 1024):
            chunk = idx[start:start + 1024]
            l, h = lo[chunk][:, None, :], hi[chunk][:, None, :]
            inter = np.minimum(h, arr[None, :, 3:]) - np.maximum(l, arr[None, :, :3])
            hit = (inter > EPS).all(axis=2).any(axis=1)
            keep.append(chunk[~hit])
        idx = np.concatenate(keep)
    if len(idx):
        idx = idx[_supported(lo[idx], hi[idx], arr)]
    if len(idx) == 0:
        return None, n_c * n_k * (len(state.arr) + 1)
    ew, eh, ed = state.extents()
    w = np.round(np.maximum(ew, hi[idx, 0]), 6)
    h = np.round(np.maximum(eh, hi[idx, 1]), 6)
    d = np.round(np.maximum(ed, hi[idx, 2]), 6)
    cz, cy, cx = lo[idx, 2], lo[idx, 1], lo[idx, 0]
    k_idx = idx % n_k
    # last key is primary: depth, height, width, then corner (z, y, x), then orientation index
    order = np.lexsort((k_idx, cx, cy, cz, w, h, d))
    return int(idx[order[0]]), n_c * n_k * (len(state.arr) + 1)


def best_corner_placement(b: BoxType, corners: Sequence[Corner], placed: Sequence[BoxPlacement],
                          dims: Sequence[float], row_orientation: Optional[Orientation] = None,
                          upright_only: bool = False):
    """The (corner, placement) minimising the resulting global (depth,
    height, width), ties by corner (z, y, x).  A given ``row_orientation``
    is used alone whenever some corner admits it."""
    state = _State.from_placements(placed, dims, [c for c in corners if c.signature == PLUS])
    pool = UPRIGHT_ORIENTATIONS if upright_only else ORIENTATIONS
    if row_orientation is not None:
        found = _choose(b, state, [row_orientation])
        if found is not None:
            return found
    return _choose(b, state, pool)


def _choose(b, state, options, corners=None, charge=None):
    """(corner, placement) of the best pair over ``options``, or None."""
    corners = state.corners if corners is None else corners
    i, n = _best(b, state, options, corners)
    if charge is not None:
        charge(n)
    if i is None:
        return None
    c, o = corners[i // len(options)], options[i % len(options)]
    size = o.apply(b.dims)
    return c, BoxPlacement(b.id, c.point[0], c.point[1], c.point[2], o, size)


def _blocked(p, arr) -> bool:
    """Is the (+, +, +) octant at point p occupied right at p?"""
    if len(arr) == 0:
        return False
    inside = ((arr[:, :3] - EPS <= p) & (p < arr[:, 3:] - EPS)).all(axis=1)
    return bool(inside.any())


def _slide(p, ax, arr):
    """Move p along -ax until it meets a box face or the wall."""
    o1, o2 = [k for k in range(3) if k != ax]
    stop = 0.0
    if len(arr):
        under = ((arr[:, o1] - EPS <= p[o1]) & (p[o1] < arr[:, o1 + 3] - EPS)
                 & (arr[:, o2] - EPS <= p[o2]) & (p[o2] < arr[:, o2 + 3] - EPS)
                 & (arr[:, ax + 3] <= p[ax] + EPS))
        if under.any():
            stop = float(arr[under, ax + 3].max())
    q = list(p)
    q[ax] = min(stop, p[ax])
    return tuple(q)


def _project(p, arr):
    """Slide down, back and left repeatedly until p rests on something in
    every direction."""
    for _ in range(64):
        q = p
        for ax in (1, 2, 0):
            q = _slide(q, ax, arr)
        if all(abs(q[k] - p[k]) <= EPS for k in range(3)):
            return q
        p = q
    return p


def _update(corners, new: BoxPlacement, arr, dims) -> list[Corner]:
    x0, y0, z0 = new.origin
    x1, y1, z1 = new.far
    lo, hi = np.array([x0, y0, z0]), np.array([x1, y1, z1])
    kept = list(corners)
    if kept:
        pts = np.array([c.point for c in kept])
        plus = np.array([c.signature == PLUS for c in kept])
        gone = plus & ((lo - EPS <= pts) & (pts < hi - EPS)).all(axis=1)
        if gone.any():
            kept = [c for c, g in zip(kept, gone) if not g]
    fresh = []
    for q in ((x1, y0, z0), (x0, y1, z0), (x0, y0, z1)):
        if any(q[k] >= dims[k] - EPS for k in range(3)):
            continue
        fresh += [q, _slide(q, 0, arr), _slide(q, 1, arr), _slide(q, 2, arr), _project(q, arr)]
    fresh = list(dict.fromkeys(tuple(round(v, 6) + 0.0 for v in r) for r in fresh))
    if fresh:
        f = np.array(fresh)
        blocked = ((arr[None, :, :3] - EPS <= f[:, None, :])
                   & (f[:, None, :] < arr[None, :, 3:] - EPS)).all(axis=2).any(axis=1)
        known = {c.point for c in kept if c.signature == PLUS}
        kept += [Corner(r, PLUS) for r, b in zip(fresh, blocked) if not b and r not in known]
    return sorted(kept, key=lambda c: (c.point[2], c.point[1], c.point[0]))


def update_corners(corners: Sequence[Corner], new_placement: BoxPlacement,
                   placed: Sequence[BoxPlacement], dims: Sequence[float]) -> list[Corner]:
    """Drop corners whose octant the new box blocks; add the new box's three
    far vertices together with their slides along -x, -y, -z and their full
    extreme-point projection; merge duplicates."""
    boxes = list(placed)
    if new_placement not in boxes:
        boxes.append(new_placement)
    arr = np.array([_box_of(p) for p in boxes], dtype=float)
    return _update(list(corners), new_placement, arr, tuple(dims))


# ------------------------------------------------------------------ search

@dataclass
class _Search:
    types: list[BoxType]
    dims: tuple[float, float, float]
    budget: Budget
    full_objective: bool
    upright_only: bool = False
    nodes: int = 0
    leaves: int = 0
    best: Optional[tuple] = None  # (key, state, counts)
    done: bool = False

    def charge(self, examined):
        n = NODE_BASE + examined // NODE_DIVISOR
        self.nodes += n
        self.budget.charge(n)

    @property
    def pool(self):
        return UPRIGHT_ORIENTATIONS if self.upright_only else ORIENTATIONS

    def stop(self) -> bool:
        return self.done or (self.best is not None and self.budget.exhausted)

    def leaf(self, state: _State, counts: dict[str, int]):
        self.leaves += 1
        ew, eh, ed = state.extents()
        vec = tuple(counts[t.id] for t in self.types)
        complete = all(counts[t.id] == t.count for t in self.types)
        ext = (round(ed, 6), round(eh, 6), round(ew, 6))
        neg = tuple(-c for c in vec)
        if self.full_objective:
            key = (0,) + ext if complete else (1,) + neg + ext
        else:
            key = neg + ext
        if self.best is None or key < self.best[0]:
            self.best = (key, state, dict(counts))
        if complete and not self.full_objective:
            self.done = True  # nothing beats placing everything

    def continue_row(self, state: _State, prev: BoxPlacement):
        """Next identical box directly beside ``prev`` along the width, same
        orientation, if it fits."""
        spot = (prev.far[0], prev.y, prev.z)
        corners = [c for c in state.corners
                   if all(abs(c.point[k] - spot[k]) <= EPS for k in range(3))]
        if not corners:
            return None
        t = next(x for x in self.types if x.id == prev.box_type)
        return _choose(t, state, [prev.orientation], corners, self.charge)

    def row_start_options(self, state: _State, t: BoxType):
        """Placements for the first box of a row: the free greedy choice
        first, then the best placement for every other distinct oriented
        shape."""
        first = _choose(t, state, self.pool, charge=self.charge)
        if first is None:
            return []
        opts, seen = [first[1]], {first[1].dims}
        for o in self.pool:
            size = o.apply(t.dims)
            if size in seen:
                continue
            seen.add(size)
            found = _choose(t, state, [o], charge=self.charge)
            if found is not None:
                opts.append(found[1])
        return opts

    def dfs(self, state: _State, counts: dict[str, int], open_ids: list[str],
            current: Optional[str], prev: Optional[BoxPlacement]):
        if self.stop():
            return
        if current is None:
            if not open_ids:
                self.leaf(state, counts)
                return
            for tid in open_ids:
                self.dfs(state, counts, open_ids, tid, None)
                if self.stop():
                    return
            return
        t = next(x for x in self.types if x.id == current)
        rest = [o for o in open_ids if o != current]
        if counts[current] == t.count:
            self.dfs(state, counts, rest, None, None)
            return
        if prev is not None:
            found = self.continue_row(state, prev)
            if found is not None:
                self._step(state, counts, open_ids, current, found[1])
                return
        opts = self.row_start_options(state, t)
        if not opts:
            # nothing more of this type fits
            self.dfs(state, counts, rest, None, None)
            return
        for p in opts:
            self._step(state, counts, open_ids, current, p)
            if self.stop():
                return

    def _step(self, state, counts, open_ids, current, p):
        child = state.copy()
        child.place(p)
        self.charge(len(child.corners) * len(child.arr) * NODE_DIVISOR // 50)
        sub = dict(counts)
        sub[current] += 1
        self.dfs(child, sub, open_ids, current, p)


def _search(boxes: Sequence[BoxType], dims, budget: Optional[Budget], full_objective: bool,
            upright_only: bool) -> BoxPackOutcome:
    types = [b for b in canonical_box_order(boxes) if b.count > 0]
    budget = budget if budget is not None else Budget.nodes(0)
    dims = tuple(float(v) for v in dims)
    s = _Search(types, dims, budget, full_objective, upright_only)
    counts = {t.id: 0 for t in types}
    s.dfs(_State(dims), counts, [t.id for t in types], None, None)
    _, state, counts = s.best
    ew, eh, ed = state.extents()
    vec = tuple(counts[t.id] for t in types)
    return BoxPackOutcome(list(state.placements), ed, eh, vec, tuple(t.id for t in types),
                          incomplete=vec != tuple(t.count for t in types),
                          nodes=s.nodes, leaves=s.leaves)


def pack_b1(boxes: Sequence[BoxType], dims: Sequence[float], budget: Optional[Budget] = None,
            seed: int = 0, upright_only: bool = False) -> BoxPackOutcome:
    """Most boxes, lexicographically by decreasing volume.

    Depth-first over which type comes next and the orientation of the
    first box of every row, with greedy corner choice inside.  The first
    leaf reached is the plain greedy packing.  The search is deterministic;
    ``seed`` is accepted for interface symmetry.
    """
    return _search(boxes, dims, budget, False, upright_only)


def pack_b2(boxes: Sequence[BoxType], dims: Sequence[float], budget: Optional[Budget] = None,
            seed: int = 0, upright_only: bool = False) -> BoxPackOutcome:
    """All boxes, minimising used depth and then used height.  Falls back to
    the best partial packing, flagged ``incomplete``, if nothing places
    everything."""
    return _search(boxes, dims, budget, True, upright_only)
