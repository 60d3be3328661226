"""Packing tube cross-sections (rings) into a rectangular section of a holder.

Construction is greedy bottom-left over tangency positions, by decreasing
diameter, with a small random component; ``pack_t1``/``pack_t2`` run seeded
restarts and keep the best outcome.  Thinner tubes are telescoped into the
bores of the packed ones afterwards.
"""

from __future__ import annotations

import heapq
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .budget import Budget
from .model import RingPlacement, TubeType, effective_ediam, floor_to_grid, snap

EPS = 1e-6
DEFAULT_NOISE = 0.2
TOP_K = 3

Circle = tuple  # (x, y, radius)


@dataclass(frozen=True)
class CrossSection:
    width: float
    height_cap: float

    def __post_init__(self):
        if self.width <= 0 or self.height_cap <= 0:
            raise ValueError(f"cross-section must be positive: {self}")


@dataclass
class PackOutcome:
    rings: list[RingPlacement]
    counts_by_type: tuple[int, ...]
    used_height: float
    type_ids: tuple[str, ...] = ()
    incomplete: bool = False
    nodes: int = 0
    restarts: int = 1
    restart_index: int = 0

    @property
    def placed(self) -> int:
        return sum(self.counts_by_type)


def _circle_circle(x1, y1, r1, x2, y2, r2):
    dx, dy = x2 - x1, y2 - y1
    d2 = dx * dx + dy * dy
    if d2 == 0.0:
        return ()
    d = math.sqrt(d2)
    if d > r1 + r2 + EPS or d < abs(r1 - r2) - EPS:
        return ()
    a = (r1 * r1 - r2 * r2 + d2) / (2.0 * d)
    h = math.sqrt(max(0.0, r1 * r1 - a * a))
    mx, my = x1 + a * dx / d, y1 + a * dy / d
    ox, oy = h * dy / d, h * dx / d
    return ((mx - ox, my + oy), (mx + ox, my - oy))


def _line_tangencies(xc, yc, dist, r, width, cap):
    """Centres at distance ``dist`` from (xc, yc) that touch a wall, floor or ceiling."""
    out = []
    for ly in (r, cap - r):
        s = dist * dist - (ly - yc) ** 2
        if s >= -EPS:
            s = math.sqrt(max(0.0, s))
            out.append((xc - s, ly))
            out.append((xc + s, ly))
    for lx in (r, width - r):
        s = dist * dist - (lx - xc) ** 2
        if s >= -EPS:
            s = math.sqrt(max(0.0, s))
            out.append((lx, yc - s))
            out.append((lx, yc + s))
    return out


def _in_bounds(x, y, r, width, cap):
    return r - EPS <= x <= width - r + EPS and r - EPS <= y <= cap - r + EPS


def _key(x, y):
    return (round(y, 9), round(x, 9))


def tangency_candidates(r: float, placed: Sequence[Circle], cs: CrossSection) -> list[tuple[float, float]]:
    """All feasible centres for a circle of radius ``r`` touching two supports.

    Supports are the floor, the ceiling, both walls and every placed circle
    (given as ``(x, y, radius)``).  Plain quadratic scan; the greedy
    constructor keeps the same set incrementally.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    w, cap = cs.width, cs.height_cap
    pts = [(r, r), (w - r, r), (r, cap - r), (w - r, cap - r)]
    for i, (xi, yi, ri) in enumerate(placed):
        pts.extend(_line_tangencies(xi, yi, ri + r, r, w, cap))
        for xj, yj, rj in placed[i + 1:]:
            pts.extend(_circle_circle(xi, yi, ri + r, xj, yj, rj + r))
    seen = {}
    for x, y in pts:
        if not _in_bounds(x, y, r, w, cap):
            continue
        if any((x - xi) ** 2 + (y - yi) ** 2 < (r + ri - EPS) ** 2 for xi, yi, ri in placed):
            continue
        seen.setdefault(_key(x, y), (x, y))
    return [seen[k] for k in sorted(seen)]


class _Section:
    """Placed circles on a uniform grid plus one bottom-left candidate heap
    per radius that is currently being packed."""

    def __init__(self, width: float, cap: float, max_radius: float):
        self.width = width
        self.cap = cap
        self.rmax = max_radius
        self.cell = max(2.0 * max_radius, 1e-3)
        self.circles: list[Circle] = []
        self.grid: dict[tuple[int, int], list[int]] = {}
        self.heaps: dict[float, list] = {}
        self.nodes = 0

    def _cell_of(self, x, y):
        return (int(x // self.cell), int(y // self.cell))

    def near(self, x, y, dist):
        span = int(dist // self.cell) + 1
        cx, cy = self._cell_of(x, y)
        grid = self.grid
        for gx in range(cx - span, cx + span + 1):
            for gy in range(cy - span, cy + span + 1):
                bucket = grid.get((gx, gy))
                if bucket:
                    yield from bucket

    def feasible(self, x, y, r) -> bool:
        if not _in_bounds(x, y, r, self.width, self.cap):
            return False
        circles = self.circles
        for i in self.near(x, y, r + self.rmax):
            xi, yi, ri = circles[i]
            lim = r + ri - EPS
            dx, dy = x - xi, y - yi
            if dx * dx + dy * dy < lim * lim:
                return False
        return True

    def _offer(self, heap, r, pts):
        for x, y in pts:
            self.nodes += 1
            if self.feasible(x, y, r):
                heapq.heappush(heap, (round(y, 9), round(x, 9), x, y))

    def activate(self, r: float) -> None:
        if r in self.heaps:
            return
        heap = self.heaps[r] = []
        w, cap = self.width, self.cap
        self._offer(heap, r, [(r, r), (w - r, r), (r, cap - r), (w - r, cap - r)])
        circles = self.circles
        for i, (xi, yi, ri) in enumerate(circles):
            pts = _line_tangencies(xi, yi, ri + r, r, w, cap)
            for j in self.near(xi, yi, ri + self.rmax + 2 * r):
                if j <= i:
                    continue
                xj, yj, rj = circles[j]
                pts.extend(_circle_circle(xi, yi, ri + r, xj, yj, rj + r))
            self._offer(heap, r, pts)

    def deactivate(self, r: float) -> None:
        self.heaps.pop(r, None)

    def add(self, x, y, rc) -> None:
        idx = len(self.circles)
        self.circles.append((x, y, rc))
        self.grid.setdefault(self._cell_of(x, y), []).append(idx)
        circles = self.circles
        for r, heap in self.heaps.items():
            pts = _line_tangencies(x, y, rc + r, r, self.width, self.cap)
            for j in self.near(x, y, rc + self.rmax + 2 * r):
                if j == idx:
                    continue
                xj, yj, rj = circles[j]
                pts.extend(_circle_circle(x, y, rc + r, xj, yj, rj + r))
            self._offer(heap, r, pts)

    def take(self, r: float, k: int) -> list:
        """Pop up to ``k`` best still-feasible candidates (stale ones are dropped)."""
        self.activate(r)
        heap = self.heaps[r]
        best = []
        while heap and len(best) < k:
            item = heapq.heappop(heap)
            self.nodes += 1
            if best and item[:2] == best[-1][:2]:
                continue  # duplicate point
            if self.feasible(item[2], item[3], r):
                best.append(item)
        return best

    def give_back(self, r: float, items) -> None:
        heap = self.heaps[r]
        for it in items:
            heapq.heappush(heap, it)

    def live_candidates(self, r: float) -> list[tuple[float, float]]:
        """Current feasible candidate set for radius ``r`` (test hook)."""
        self.activate(r)
        pts = {}
        for ky, kx, x, y in self.heaps[r]:
            if self.feasible(x, y, r):
                pts.setdefault((ky, kx), (x, y))
        return [pts[k] for k in sorted(pts)]


def _type_order(tubes: Iterable[TubeType]) -> list[TubeType]:
    return sorted(tubes, key=lambda t: -effective_ediam(t))


def greedy_construct(tubes: Sequence[TubeType], cs: CrossSection, rng_seed: int = 0,
                     noise: float = DEFAULT_NOISE, margin: float = 0.0,
                     clearance: float = 0.0, k: int = TOP_K,
                     order_noise: Optional[float] = None) -> PackOutcome:
    """One bottom-left construction.

    Units go by decreasing external diameter and each takes the lowest,
    then leftmost, tangency position.  Two random deviations diversify
    restarts: with probability ``order_noise`` (defaults to ``noise``) the
    next unit comes from one of the other open types, and with probability
    ``noise`` the position is drawn uniformly from the ``k`` best.  A type
    closes once a unit of it finds no position.

    ``margin`` inflates every radius (the solver uses it so coordinates can
    be rounded to the grid safely).  Leftover units are finally telescoped
    into the placed rings.
    """
    if order_noise is None:
        order_noise = noise
    order = _type_order(t for t in tubes if t.count > 0)
    rng = random.Random(rng_seed)
    w, cap = cs.width, cs.height_cap
    rmax = max((t.radius + margin for t in order), default=1.0)
    sec = _Section(w, cap, rmax)
    rings: list[RingPlacement] = []
    placed = {t.id: 0 for t in order}
    radius = {t.id: t.radius + margin for t in order}
    open_types = [t for t in order
                  if 2 * radius[t.id] <= w + EPS and 2 * radius[t.id] <= cap + EPS]
    used_height = 0.0

    def close(t):
        open_types.remove(t)
        r = radius[t.id]
        if all(radius[o.id] != r for o in open_types):
            sec.deactivate(r)

    while open_types:
        t = open_types[0]
        if order_noise > 0 and len(open_types) > 1 and rng.random() < order_noise:
            t = open_types[1 + rng.randrange(len(open_types) - 1)]
        r = radius[t.id]
        best = sec.take(r, k if noise > 0 else 1)
        if not best:
            close(t)
            continue
        pick = 0
        if noise > 0 and len(best) > 1 and rng.random() < noise:
            pick = rng.randrange(len(best))
        chosen = best.pop(pick)
        sec.give_back(r, best)
        x, y = chosen[2], chosen[3]
        sec.add(x, y, r)
        rings.append(RingPlacement(f"R{len(rings) + 1}", t.id, x, y))
        placed[t.id] += 1
        used_height = max(used_height, y + r)
        if placed[t.id] == t.count:
            close(t)
    leftovers = [t.with_count(t.count - placed[t.id]) for t in order if t.count > placed[t.id]]
    if leftovers and rings:
        catalog = {t.id: t for t in order}
        rings, rest = telescope_fill(rings, leftovers, catalog, clearance)
        left = {t.id: t.count for t in rest}
        for t in leftovers:
            placed[t.id] += t.count - left.get(t.id, 0)
    counts = tuple(placed[t.id] for t in order)
    return PackOutcome(rings, counts, used_height, tuple(t.id for t in order),
                       incomplete=sum(counts) < sum(t.count for t in order), nodes=sec.nodes)


def telescope_fill(rings: Sequence[RingPlacement], pool: Sequence[TubeType],
                   catalog: Mapping[str, TubeType], clearance: float = 0.0
                   ) -> tuple[list[RingPlacement], list[TubeType]]:
    """Insert pool tubes into the bores of ``rings``, recursively.

    Hosts are served by decreasing internal diameter; each receives the
    widest pool tube whose effective diameter fits its bore, repeated
    end-to-end along the depth while the host's length allows.  Inserted
    tubes become hosts in turn.  A child rests on the bottom of its host's
    bore, offset rounded down to the 0.01 mm grid.

    Returns the extended ring list and the remaining pool.
    """
    catalog = dict(catalog)
    for t in pool:
        catalog.setdefault(t.id, t)
    counts = {t.id: t.count for t in pool}
    # widest first, then longest; stable for equal keys
    candidates = sorted((t for t in pool if t.count > 0),
                        key=lambda t: (-effective_ediam(t), -t.len))
    out = list(rings)
    used_len: dict[str, float] = {}
    for ring in out:
        if ring.parent is not None:
            used_len[ring.parent] = used_len.get(ring.parent, 0.0) + catalog[ring.tube_type].len
    next_id = 1 + max((int(r.id[1:]) for r in out if r.id[1:].isdigit()), default=0)
    heap = [(-catalog[r.tube_type].idiam, i, r) for i, r in enumerate(out)]
    heapq.heapify(heap)
    seq = len(heap)
    while heap and candidates:
        _, _, host = heapq.heappop(heap)
        ht = catalog[host.tube_type]
        bore = ht.idiam - clearance
        used = used_len.get(host.id, 0.0)
        while True:
            remaining = ht.len - used
            child_t = None
            for t in candidates:
                if counts[t.id] > 0 and effective_ediam(t) <= bore + 1e-9 and t.len <= remaining + 1e-9:
                    child_t = t
                    break
            if child_t is None:
                break
            offset = floor_to_grid((ht.idiam - effective_ediam(child_t)) / 2.0)
            child = RingPlacement(f"R{next_id}", child_t.id, host.x, host.y - offset,
                                  host.z_offset + used, host.id)
            next_id += 1
            out.append(child)
            used += child_t.len
            counts[child_t.id] -= 1
            if counts[child_t.id] == 0:
                candidates = [t for t in candidates if counts[t.id] > 0]
            heapq.heappush(heap, (-child_t.idiam, seq, child))
            seq += 1
        used_len[host.id] = used
    rest = [t.with_count(counts[t.id]) for t in pool]
    return out, rest


def _restart_job(args) -> PackOutcome:
    tubes, cs, seed, noise, order_noise, margin, clearance = args
    return greedy_construct(tubes, cs, seed, noise, margin, clearance, order_noise=order_noise)


def _run_restarts(tubes, cs, budget, seed, noise, order_noise, margin, clearance, restarts, workers,
                  better: Callable[[PackOutcome, PackOutcome], bool],
                  optimal: Callable[[PackOutcome], bool]) -> PackOutcome:
    """Restart i uses seed+i (restart 0 is noise-free).  The number of
    restarts is fixed by sequential node accounting, so a worker pool gives
    the same answer as a single process."""
    tubes = list(tubes)
    budget = budget if budget is not None else Budget.nodes(0)

    def args(i):
        if i == 0:
            return (tubes, cs, seed, 0.0, 0.0, margin, clearance)
        return (tubes, cs, seed + i, noise, order_noise, margin, clearance)

    def stop(i):
        if restarts is not None:
            return i >= restarts
        return budget.exhausted

    best: Optional[PackOutcome] = None
    total_nodes = 0
    i = 0
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        done = False
        while not done:
            n = workers if pool is not None else 1
            batch = [args(j) for j in range(i, i + n)]
            results = list(pool.map(_restart_job, batch)) if pool is not None else [_restart_job(batch[0])]
            for out in results:
                out.restart_index = i
                budget.charge(out.nodes)
                total_nodes += out.nodes
                i += 1
                if best is None or better(out, best):
                    best = out
                if optimal(best) or stop(i):
                    done = True
                    break
    finally:
        if pool is not None:
            pool.shutdown()
    best.nodes = total_nodes
    best.restarts = i
    return best


def _lex_better(a: PackOutcome, b: PackOutcome) -> bool:
    return a.counts_by_type > b.counts_by_type


def pack_t1(tubes: Sequence[TubeType], cs: CrossSection, budget: Optional[Budget] = None,
            seed: int = 0, noise: float = DEFAULT_NOISE, margin: float = 0.0,
            clearance: float = 0.0, restarts: Optional[int] = None,
            workers: int = 1, order_noise: Optional[float] = None) -> PackOutcome:
    """Maximise the per-type counts lexicographically by decreasing diameter."""
    order_noise = noise if order_noise is None else order_noise
    return _run_restarts(tubes, cs, budget, seed, noise, order_noise, margin, clearance, restarts,
                         workers, _lex_better, lambda o: not o.incomplete)


def pack_t2(tubes: Sequence[TubeType], cs: CrossSection, budget: Optional[Budget] = None,
            seed: int = 0, noise: float = DEFAULT_NOISE, margin: float = 0.0,
            clearance: float = 0.0, restarts: Optional[int] = None,
            workers: int = 1, order_noise: Optional[float] = None) -> PackOutcome:
    """Minimum-height packing of the whole set.

    If no restart places everything, the lexicographically best outcome is
    returned with ``incomplete`` set.
    """
    present = [t for t in tubes if t.count > 0]
    if not present:
        return PackOutcome([], (), 0.0, restarts=0)
    floor_height = max(effective_ediam(t) + 2 * margin for t in present)

    def better(a, b):
        if a.incomplete != b.incomplete:
            return not a.incomplete
        if a.incomplete:
            return _lex_better(a, b)
        return a.used_height < b.used_height - 1e-9

    def optimal(o):
        return not o.incomplete and o.used_height <= floor_height + 1e-9

    order_noise = noise if order_noise is None else order_noise
    return _run_restarts(present, cs, budget, seed, noise, order_noise, margin, clearance, restarts,
                         workers, better, optimal)


def top_level(rings: Iterable[RingPlacement]) -> list[RingPlacement]:
    return [r for r in rings if r.parent is None]


def snap_rings(rings: Iterable[RingPlacement]) -> list[RingPlacement]:
    return [RingPlacement(r.id, r.tube_type, snap(r.x), snap(r.y), snap(r.z_offset), r.parent)
            for r in rings]
