"""Plain-text instance format.

::

    container
    # width height depth
    2350    2690    12000

    tubes
    # ID idiam ediam len number [socket_ediam] [value]
    A  108.38  128.33  12000  144

    boxes
    # ID width height depth number [value]
    B1  500  330  800  10

Lines starting with ``#`` and blank lines are ignored.  A tube line with a
value but no socket uses ``-`` in the socket column.
"""

from __future__ import annotations

import re
from typing import Optional

from ..model import BoxType, ContainerSpec, Instance, TubeType

_NUMBER = re.compile(r"-?\d+(?:\.\d{1,2})?")
_COUNT = re.compile(r"\d+")
_ID = re.compile(r"[A-Za-z0-9_.\-]+")
SECTIONS = ("container", "tubes", "boxes")


class ParseError(ValueError):
    """Bad instance text; ``line`` and ``col`` are 1-based."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class DuplicateId(ParseError):
    pass


class NonPositiveDimension(ParseError):
    pass


def _tokens(line: str):
    """(column, token) pairs of a whitespace-separated line."""
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]


def _number(tok, lineno, positive=True, allow_zero=False) -> float:
    col, text = tok
    if not _NUMBER.fullmatch(text):
        raise ParseError(f"expected a number with at most 2 decimals, got {text!r}", lineno, col)
    value = float(text)
    if positive and (value < 0 or (value == 0 and not allow_zero)):
        raise NonPositiveDimension(f"dimension must be positive, got {text}", lineno, col)
    return value


def _count(tok, lineno) -> int:
    col, text = tok
    if not _COUNT.fullmatch(text):
        raise ParseError(f"expected a non-negative integer count, got {text!r}", lineno, col)
    return int(text)


def _ident(tok, lineno) -> str:
    col, text = tok
    if not _ID.fullmatch(text) or text == "-":
        raise ParseError(f"bad identifier {text!r}", lineno, col)
    return text


def _value(tok, lineno) -> float:
    return _number(tok, lineno, positive=True, allow_zero=True)


def _tube(toks, lineno) -> TubeType:
    if len(toks) not in (5, 6, 7):
        col = toks[min(len(toks), 7) - 1][0] if len(toks) > 7 else toks[-1][0]
        raise ParseError(f"tube line needs 5 to 7 fields, got {len(toks)}", lineno, col)
    tid = _ident(toks[0], lineno)
    idiam = _number(toks[1], lineno, allow_zero=True)
    ediam = _number(toks[2], lineno)
    length = _number(toks[3], lineno)
    count = _count(toks[4], lineno)
    if ediam <= idiam:
        raise NonPositiveDimension("external diameter must exceed internal diameter",
                                   lineno, toks[2][0])
    socket: Optional[float] = None
    if len(toks) >= 6 and toks[5][1] != "-":
        socket = _number(toks[5], lineno)
        if socket < ediam:
            raise NonPositiveDimension("socket diameter below external diameter",
                                       lineno, toks[5][0])
    value = _value(toks[6], lineno) if len(toks) == 7 else 0.0
    return TubeType(tid, idiam, ediam, length, count, socket, value)


def _box(toks, lineno) -> BoxType:
    if len(toks) not in (5, 6):
        raise ParseError(f"box line needs 5 or 6 fields, got {len(toks)}", lineno, toks[-1][0])
    bid = _ident(toks[0], lineno)
    w, h, d = (_number(t, lineno) for t in toks[1:4])
    count = _count(toks[4], lineno)
    value = _value(toks[5], lineno) if len(toks) == 6 else 0.0
    return BoxType(bid, w, h, d, count, value)


def parse_instance(text: str) -> Instance:
    """Parse instance text; raises ParseError (or a subclass) with a position."""
    section = None
    seen: list[str] = []
    container: Optional[ContainerSpec] = None
    tubes: list[TubeType] = []
    boxes: list[BoxType] = []
    ids: dict[str, set] = {"tubes": set(), "boxes": set()}
    last = 1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last = lineno
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        toks = _tokens(raw)
        if len(toks) == 1 and toks[0][1] in SECTIONS:
            name = toks[0][1]
            if name in seen:
                raise ParseError(f"section {name!r} repeated", lineno, toks[0][0])
            if seen and SECTIONS.index(name) < SECTIONS.index(seen[-1]):
                raise ParseError(f"section {name!r} out of order", lineno, toks[0][0])
            if name != "container" and container is None:
                raise ParseError("the container section must come first", lineno, toks[0][0])
            seen.append(name)
            section = name
            continue
        if section is None:
            raise ParseError("data before any section header", lineno, toks[0][0])
        if section == "container":
            if container is not None:
                raise ParseError("container section takes a single line", lineno, toks[0][0])
            if len(toks) != 3:
                raise ParseError(f"container line needs 3 fields, got {len(toks)}", lineno, toks[-1][0])
            w, h, d = (_number(t, lineno) for t in toks)
            container = ContainerSpec(w, h, d)
            continue
        item = _tube(toks, lineno) if section == "tubes" else _box(toks, lineno)
        if item.id in ids[section]:
            raise DuplicateId(f"duplicate id {item.id!r}", lineno, toks[0][0])
        ids[section].add(item.id)
        (tubes if section == "tubes" else boxes).append(item)
    if container is None:
        raise ParseError("missing container section", last, 1)
    if not tubes and not boxes:
        raise ParseError("instance lists no tubes and no boxes", last, 1)
    return Instance(container, tuple(tubes), tuple(boxes), source=text)


def fmt_number(v: float) -> str:
    """Shortest text with at most 2 decimals: 12000, 77.8, 128.33."""
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s in ("", "-0") else s


def format_instance(inst: Instance) -> str:
    """Canonical text for an instance; parsing it gives the same instance."""
    c = inst.container
    out = ["container", "# width height depth",
           " ".join(fmt_number(v) for v in (c.width, c.height, c.depth))]
    if inst.tubes:
        out += ["", "tubes", "# ID idiam ediam len number [socket_ediam] [value]"]
        for t in inst.tubes:
            row = [t.id, fmt_number(t.idiam), fmt_number(t.ediam), fmt_number(t.len), str(t.count)]
            if t.socket_ediam is not None or t.unit_value:
                row.append("-" if t.socket_ediam is None else fmt_number(t.socket_ediam))
            if t.unit_value:
                row.append(fmt_number(t.unit_value))
            out.append(" ".join(row))
    if inst.boxes:
        out += ["", "boxes", "# ID width height depth number [value]"]
        for b in inst.boxes:
            row = [b.id, fmt_number(b.width), fmt_number(b.height), fmt_number(b.depth), str(b.count)]
            if b.unit_value:
                row.append(fmt_number(b.unit_value))
            out.append(" ".join(row))
    return "\n".join(out) + "\n"
