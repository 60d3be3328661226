"""Domain types shared by the packers, the partition solver and the I/O layer.

All lengths are millimetres.  Stored coordinates and dimensions live on a
0.01 mm grid (see :func:`snap`); geometry is computed in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

GRID = 0.01


def snap(value: float) -> float:
    """Round to the nearest 0.01 mm."""
    return round(value + 0.0, 2) + 0.0


def ceil_to_grid(value: float) -> float:
    # 1e-7 absorbs float noise such as 186.60000000000002
    return math.ceil(value * 100.0 - 1e-7) / 100.0


def floor_to_grid(value: float) -> float:
    return math.floor(value * 100.0 + 1e-7) / 100.0


@dataclass(frozen=True)
class ContainerSpec:
    width: float
    height: float
    depth: float

    def __post_init__(self):
        if min(self.width, self.height, self.depth) <= 0:
            raise ValueError(f"container dimensions must be positive: {self}")

    @property
    def volume(self) -> float:
        return self.width * self.height * self.depth


@dataclass(frozen=True)
class TubeType:
    id: str
    idiam: float
    ediam: float
    len: float
    count: int = 0
    socket_ediam: Optional[float] = None
    unit_value: float = 0.0

    def __post_init__(self):
        if not 0 <= self.idiam < self.ediam:
            raise ValueError(f"tube {self.id}: need 0 <= idiam < ediam")
        if self.len <= 0:
            raise ValueError(f"tube {self.id}: length must be positive")
        if self.socket_ediam is not None and self.socket_ediam < self.ediam:
            raise ValueError(f"tube {self.id}: socket diameter below external diameter")
        if self.count < 0:
            raise ValueError(f"tube {self.id}: negative count")

    @property
    def radius(self) -> float:
        return effective_ediam(self) / 2.0

    def with_count(self, count: int) -> "TubeType":
        return TubeType(self.id, self.idiam, self.ediam, self.len, count,
                        self.socket_ediam, self.unit_value)


@dataclass(frozen=True)
class BoxType:
    id: str
    width: float
    height: float
    depth: float
    count: int = 0
    unit_value: float = 0.0

    def __post_init__(self):
        if min(self.width, self.height, self.depth) <= 0:
            raise ValueError(f"box {self.id}: dimensions must be positive")
        if self.count < 0:
            raise ValueError(f"box {self.id}: negative count")

    @property
    def dims(self) -> tuple[float, float, float]:
        return (self.width, self.height, self.depth)

    @property
    def volume(self) -> float:
        return self.width * self.height * self.depth

    def with_count(self, count: int) -> "BoxType":
        return BoxType(self.id, self.width, self.height, self.depth, count, self.unit_value)


_AXIS_LETTERS = "WHD"


@dataclass(frozen=True)
class Orientation:
    """Which box dimension lies along each container axis.

    ``perm[k]`` is the index (0=width, 1=height, 2=depth) of the box
    dimension placed along container axis k (x, y, z).
    """

    perm: tuple[int, int, int]

    def __post_init__(self):
        if sorted(self.perm) != [0, 1, 2]:
            raise ValueError(f"not a permutation: {self.perm}")

    @property
    def name(self) -> str:
        return "".join(_AXIS_LETTERS[i] for i in self.perm)

    @classmethod
    def from_name(cls, name: str) -> "Orientation":
        try:
            return cls(tuple(_AXIS_LETTERS.index(c) for c in name))
        except (ValueError, TypeError):
            raise ValueError(f"bad orientation name {name!r}") from None

    def apply(self, dims: Sequence[float]) -> tuple[float, float, float]:
        return (dims[self.perm[0]], dims[self.perm[1]], dims[self.perm[2]])


ORIENTATIONS: tuple[Orientation, ...] = tuple(
    Orientation(p) for p in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))
)
# rotations about the vertical axis only: height stays on y
UPRIGHT_ORIENTATIONS: tuple[Orientation, ...] = (ORIENTATIONS[0], ORIENTATIONS[5])


@dataclass(frozen=True)
class RingPlacement:
    """A tube seen in cross-section.  ``parent`` is the id of the hosting ring
    when the tube is telescoped, else None."""

    id: str
    tube_type: str
    x: float
    y: float
    z_offset: float = 0.0
    parent: Optional[str] = None

    @property
    def center(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class BoxPlacement:
    box_type: str
    x: float
    y: float
    z: float
    orientation: Orientation
    dims: tuple[float, float, float]  # oriented (along x, y, z)

    @property
    def origin(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    @property
    def far(self) -> tuple[float, float, float]:
        return (self.x + self.dims[0], self.y + self.dims[1], self.z + self.dims[2])


TUBES = "tubes"
BOXES = "boxes"


@dataclass
class Holder:
    id: str
    kind: str  # TUBES or BOXES
    origin: tuple[float, float, float]
    dims: tuple[float, float, float]
    rings: list[RingPlacement] = field(default_factory=list)
    boxes: list[BoxPlacement] = field(default_factory=list)

    @property
    def volume(self) -> float:
        return self.dims[0] * self.dims[1] * self.dims[2]

    def children_of(self, ring_id: Optional[str]) -> list[RingPlacement]:
        return [r for r in self.rings if r.parent == ring_id]


@dataclass
class PackedContainer:
    holders: list[Holder] = field(default_factory=list)


@dataclass
class Solution:
    container: ContainerSpec
    containers: list[PackedContainer] = field(default_factory=list)
    unpacked_tubes: dict[str, int] = field(default_factory=dict)
    unpacked_boxes: dict[str, int] = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    instance_digest: str = ""
    # item catalogs (counts unused) so the document can be drawn on its own
    tube_types: dict[str, TubeType] = field(default_factory=dict)
    box_types: dict[str, BoxType] = field(default_factory=dict)

    @property
    def containers_used(self) -> int:
        return len(self.containers)

    @property
    def complete(self) -> bool:
        return not any(self.unpacked_tubes.values()) and not any(self.unpacked_boxes.values())


@dataclass(frozen=True)
class Instance:
    container: ContainerSpec
    tubes: tuple[TubeType, ...] = ()
    boxes: tuple[BoxType, ...] = ()
    source: Optional[str] = field(default=None, compare=False, repr=False)

    @property
    def total_tubes(self) -> int:
        return sum(t.count for t in self.tubes)

    @property
    def total_boxes(self) -> int:
        return sum(b.count for b in self.boxes)


def effective_ediam(t: TubeType) -> float:
    """External diameter used for all packing geometry (the socket wins)."""
    return t.socket_ediam if t.socket_ediam is not None else t.ediam


def canonical_tube_order(ts: Iterable[TubeType]) -> list[TubeType]:
    return sorted(ts, key=lambda t: (-t.len, -effective_ediam(t)))


def canonical_box_order(bs: Iterable[BoxType]) -> list[BoxType]:
    return sorted(bs, key=lambda b: -b.volume)


def orientations_of(b: BoxType, upright_only: bool = False) -> list[tuple[Orientation, tuple[float, float, float]]]:
    """All orientations with their oriented dims; duplicates are kept."""
    pool = UPRIGHT_ORIENTATIONS if upright_only else ORIENTATIONS
    return [(o, o.apply(b.dims)) for o in pool]


def tube_volume(t: TubeType) -> float:
    """Envelope volume of one tube (its outer cylinder)."""
    return math.pi * (effective_ediam(t) / 2.0) ** 2 * t.len
