"""SVG drawings of a solution and text manifests of box holders.

``render_longitudinal`` draws one container seen from the side (depth to
the right, height up) with a labelled rectangle per holder.
``render_transversal`` draws the cross-section of one tube holder.  Both
return plain SVG 1.1 text and depend only on the solution document.
"""

from __future__ import annotations

from collections import Counter
from html import escape

from ..model import BOXES, TUBES, Holder, Solution, effective_ediam

_PALETTE = {TUBES: "#cfe2f3", BOXES: "#f6d5a8"}


class NotATubeHolder(LookupError):
    pass


class NotABoxHolder(LookupError):
    pass


def _n(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s in ("", "-0") else s


def find_holder(sol: Solution, holder_id: str) -> tuple[int, Holder]:
    """Look up ``"H3"`` (first container) or ``"C2:H3"``; returns the
    1-based container index and the holder."""
    ci = 1
    hid = holder_id
    if ":" in holder_id:
        head, hid = holder_id.split(":", 1)
        if not head.startswith("C") or not head[1:].isdigit():
            raise KeyError(f"bad holder reference {holder_id!r}")
        ci = int(head[1:])
    if not 1 <= ci <= len(sol.containers):
        raise KeyError(f"no container {ci}")
    for h in sol.containers[ci - 1].holders:
        if h.id == hid:
            return ci, h
    raise KeyError(f"no holder {holder_id!r}")


def _summary(h: Holder) -> str:
    if h.kind == TUBES:
        counts = Counter(r.tube_type for r in h.rings)
    else:
        counts = Counter(p.box_type for p in h.boxes)
    return ", ".join(f"{k}x{counts[k]}" for k in sorted(counts))


def _svg(width: float, height: float, body: list[str], pixels: float = 1200.0) -> str:
    pad = max(width, height) * 0.04
    vw, vh = width + 2 * pad, height + 2 * pad
    px_h = pixels * vh / vw
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_n(pixels)}" '
            f'height="{_n(px_h)}" viewBox="{_n(-pad)} {_n(-pad)} {_n(vw)} {_n(vh)}">')
    return "\n".join([head] + body + ["</svg>"]) + "\n"


def render_longitudinal(sol: Solution, container_index: int) -> str:
    """Side view of container ``container_index`` (1-based)."""
    if not 1 <= container_index <= len(sol.containers):
        raise IndexError(f"container {container_index} does not exist")
    c = sol.container
    depth, height = c.depth, c.height
    font = max(depth, height) * 0.012
    body = [f'<rect x="0" y="0" width="{_n(depth)}" height="{_n(height)}" '
            f'fill="none" stroke="black" stroke-width="{_n(font * 0.3)}"/>',
            f'<text x="0" y="{_n(height + font * 1.5)}" font-size="{_n(font)}">'
            f'Container {container_index}: depth {_n(depth)} (right), height {_n(height)} (up)</text>']
    for h in sol.containers[container_index - 1].holders:
        x, y = h.origin[2], height - (h.origin[1] + h.dims[1])
        body.append(f'<rect x="{_n(x)}" y="{_n(y)}" width="{_n(h.dims[2])}" height="{_n(h.dims[1])}" '
                    f'fill="{_PALETTE[h.kind]}" stroke="black" stroke-width="{_n(font * 0.15)}"/>')
        label = escape(f"{h.id} {h.kind}: {_summary(h)}")
        body.append(f'<text x="{_n(x + font * 0.5)}" y="{_n(y + min(h.dims[1], font * 1.5))}" '
                    f'font-size="{_n(min(font, max(h.dims[1], 1.0)))}">{label}</text>')
    return _svg(depth, height + font * 2, body)


def render_transversal(sol: Solution, holder_id: str) -> str:
    """Cross-section of a tube holder, telescoped rings drawn in their hosts."""
    ci, h = find_holder(sol, holder_id)
    if h.kind != TUBES:
        raise NotATubeHolder(f"{holder_id} holds boxes")
    width, height = h.dims[0], h.dims[1]
    font = max(width, height) * 0.015
    body = [f'<rect x="0" y="0" width="{_n(width)}" height="{_n(height)}" fill="none" '
            f'stroke="black" stroke-width="{_n(font * 0.2)}"/>',
            f'<text x="0" y="{_n(height + font * 1.5)}" font-size="{_n(font)}">'
            f'C{ci}:{escape(h.id)} section {_n(width)} x {_n(height)}, depth {_n(h.dims[2])}</text>']
    depth_of = {}
    for r in h.rings:
        depth_of[r.id] = 0 if r.parent is None else depth_of.get(r.parent, 0) + 1
    for r in sorted(h.rings, key=lambda r: depth_of[r.id]):
        t = sol.tube_types.get(r.tube_type)
        if t is None:
            raise KeyError(f"tube type {r.tube_type!r} missing from the solution")
        cy = height - r.y
        shade = ("#4a86c5", "#7fb069", "#e0a458", "#c95d63")[depth_of[r.id] % 4]
        body.append(f'<circle cx="{_n(r.x)}" cy="{_n(cy)}" r="{_n(effective_ediam(t) / 2)}" '
                    f'fill="{shade}" stroke="black" stroke-width="{_n(font * 0.05)}"/>')
        body.append(f'<circle cx="{_n(r.x)}" cy="{_n(cy)}" r="{_n(t.idiam / 2)}" fill="white" '
                    f'stroke="black" stroke-width="{_n(font * 0.03)}"/>')
    for r in h.rings:
        if r.parent is None:
            t = sol.tube_types[r.tube_type]
            size = min(font, effective_ediam(t) * 0.3)
            body.append(f'<text x="{_n(r.x)}" y="{_n(height - r.y + size * 0.35)}" font-size="{_n(size)}" '
                        f'text-anchor="middle">{escape(r.tube_type)}</text>')
    return _svg(width, height + font * 2, body, pixels=900.0)


def box_manifest(sol: Solution, holder_id: str) -> str:
    """One line per box of a box holder, ordered by (z, y, x)."""
    ci, h = find_holder(sol, holder_id)
    if h.kind != BOXES:
        raise NotABoxHolder(f"{holder_id} holds tubes")
    rows = [("box", "x", "y", "z", "width", "height", "depth", "orientation")]
    for p in sorted(h.boxes, key=lambda p: (p.z, p.y, p.x)):
        rows.append((p.box_type, f"{p.x:.2f}", f"{p.y:.2f}", f"{p.z:.2f}",
                     f"{p.dims[0]:.2f}", f"{p.dims[1]:.2f}", f"{p.dims[2]:.2f}", p.orientation.name))
    widths = [max(len(r[k]) for r in rows) for k in range(len(rows[0]))]
    lines = [f"# C{ci}:{h.id} boxes"]
    for r in rows:
        lines.append("  ".join(cell.ljust(widths[k]) if k == 0 else cell.rjust(widths[k])
                               for k, cell in enumerate(r)).rstrip())
    return "\n".join(lines) + "\n"
