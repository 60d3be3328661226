"""Brute-force reference solvers used only by the tests.

They share no code with the package: tangency geometry, overlap tests and
box containment are re-derived here from scratch.
"""

from __future__ import annotations

import itertools
import math

TOL = 1e-6


# ---------------------------------------------------------------- circles

def _touching_points(r, circles, width, cap):
    """Every centre where a circle of radius r touches two supports.

    The ceiling is left out: a circle touching it already sits at the cap,
    so it can never lower the minimum height.
    """
    lines_h = [r]            # floor, as y = const
    lines_v = [r, width - r]  # walls, as x = const
    pts = [(x, y) for x in lines_v for y in lines_h]
    for (cx, cy, cr) in circles:
        big = cr + r
        for y in lines_h:
            dy = y - cy
            if big * big >= dy * dy:
                s = math.sqrt(big * big - dy * dy)
                pts += [(cx - s, y), (cx + s, y)]
        for x in lines_v:
            dx = x - cx
            if big * big >= dx * dx:
                s = math.sqrt(big * big - dx * dx)
                pts += [(x, cy - s), (x, cy + s)]
    for (ax, ay, ar), (bx, by, br) in itertools.combinations(circles, 2):
        ra, rb = ar + r, br + r
        d = math.hypot(bx - ax, by - ay)
        if d == 0 or d > ra + rb or d < abs(ra - rb):
            continue
        # law of cosines along the centre line
        along = (ra * ra - rb * rb + d * d) / (2 * d)
        perp = math.sqrt(max(0.0, ra * ra - along * along))
        ux, uy = (bx - ax) / d, (by - ay) / d
        px, py = ax + along * ux, ay + along * uy
        pts += [(px - perp * uy, py + perp * ux), (px + perp * uy, py - perp * ux)]
    ok = []
    for x, y in pts:
        if x < r - TOL or x > width - r + TOL or y < r - TOL or y > cap - r + TOL:
            continue
        if all(math.hypot(x - cx, y - cy) >= cr + r - TOL for cx, cy, cr in circles):
            ok.append((x, y))
    return ok


def min_height_exhaustive(radii, width, cap=10_000.0):
    """Smallest top over every order and every tangency choice, or None if
    some circle can never be placed."""
    radii = sorted(radii)
    best = [math.inf]
    seen = set()

    def rec(circles, left, top):
        if top >= best[0] - 1e-9:
            return
        if not left:
            best[0] = top
            return
        key = (tuple(sorted((round(x, 6), round(y, 6), cr) for x, y, cr in circles)), tuple(left))
        if key in seen:
            return
        seen.add(key)
        for r in sorted(set(left)):
            rest = list(left)
            rest.remove(r)
            for x, y in _touching_points(r, circles, width, cap):
                rec(circles + [(x, y, r)], rest, max(top, y + r))

    rec([], radii, 0.0)
    return None if best[0] == math.inf else best[0]


# ---------------------------------------------------------------- boxes

_PERMS = list(itertools.permutations(range(3)))


def _overlap(a, b):
    return all(a[k] < b[k + 3] - TOL and b[k] < a[k + 3] - TOL for k in range(3))


def _supported(p, placed):
    """The box touches a wall or a box face, with positive contact area,
    on its -x, -y and -z sides."""
    for ax in range(3):
        if abs(p[ax]) <= TOL:
            continue
        o1, o2 = [k for k in range(3) if k != ax]
        if not any(abs(q[ax + 3] - p[ax]) <= TOL
                   and min(p[o1 + 3], q[o1 + 3]) - max(p[o1], q[o1]) > TOL
                   and min(p[o2 + 3], q[o2 + 3]) - max(p[o2], q[o2]) > TOL
                   for q in placed):
            return False
    return True


def _positions(dims, placed, holder):
    xs = {0.0} | {q[3] for q in placed}
    ys = {0.0} | {q[4] for q in placed}
    zs = {0.0} | {q[5] for q in placed}
    for x in xs:
        for y in ys:
            for z in zs:
                p = (x, y, z, x + dims[0], y + dims[1], z + dims[2])
                if any(p[k + 3] > holder[k] + TOL for k in range(3)):
                    continue
                if any(_overlap(p, q) for q in placed):
                    continue
                if _supported(p, placed):
                    yield p


def box_bruteforce(types, holder):
    """Exhaustive search over placement orders, orientations and supported
    anchor points.

    ``types`` is a list of ``(dims, count)`` already sorted by decreasing
    volume.  Returns ``(best_counts, best_full)`` where best_counts is the
    lexicographic maximum of per-type counts and best_full the minimum
    (depth, height) over packings that place everything (None if none do).
    """
    best_counts = [tuple(0 for _ in types)]
    best_full = [None]
    total = tuple(c for _, c in types)
    seen = set()

    def rec(placed, counts):
        key = (tuple(sorted(placed)), counts)
        if key in seen:
            return
        seen.add(key)
        if counts > best_counts[0]:
            best_counts[0] = counts
        if counts == total:
            d = max((q[5] for q in placed), default=0.0)
            h = max((q[4] for q in placed), default=0.0)
            if best_full[0] is None or (d, h) < best_full[0]:
                best_full[0] = (d, h)
            return
        for ti, (dims, cnt) in enumerate(types):
            if counts[ti] >= cnt:
                continue
            nxt = counts[:ti] + (counts[ti] + 1,) + counts[ti + 1:]
            for perm in set(tuple(dims[i] for i in p) for p in _PERMS):
                for p in _positions(perm, placed, holder):
                    rec(placed + [p], nxt)

    rec([], tuple(0 for _ in types))
    return best_counts[0], best_full[0]
