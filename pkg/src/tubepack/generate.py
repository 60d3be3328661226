"""Random instances shaped like the industrial benchmark set.

Only the size profile is reproduced (number of types and of items); the
dimensions themselves are drawn at random from plausible ranges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import BoxType, ContainerSpec, Instance, TubeType

DEFAULT_CONTAINER = ContainerSpec(2350.0, 2690.0, 12000.0)


@dataclass(frozen=True)
class GenProfile:
    n_tube_types: int
    total_tubes: int
    n_box_types: int
    total_boxes: int
    seed: int = 0
    container: ContainerSpec = DEFAULT_CONTAINER
    lengths: tuple[float, ...] = (12000.0, 6000.0, 5000.0, 3000.0)
    ediam_range: tuple[float, float] = (40.0, 180.0)
    bore_ratio: tuple[float, float] = (0.6, 0.95)
    box_side_range: tuple[float, float] = (200.0, 800.0)

    def __post_init__(self):
        for name in ("n_tube_types", "total_tubes", "n_box_types", "total_boxes"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.n_tube_types > self.total_tubes or self.n_box_types > self.total_boxes:
            raise ValueError("more item types than items")
        if (self.total_tubes > 0) != (self.n_tube_types > 0) or (self.total_boxes > 0) != (self.n_box_types > 0):
            raise ValueError("items need at least one type, and types at least one item")
        if self.total_tubes + self.total_boxes == 0:
            raise ValueError("profile generates no items")
        lo, hi = self.bore_ratio
        if not 0 <= lo <= hi < 1:
            raise ValueError("bore ratio range must lie in [0, 1)")


# size profiles of the occ-cie benchmark instances: (N, T, M, B)
PRESETS: dict[str, tuple[int, int, int, int]] = {
    "occ-cie-1": (3, 832, 2, 21),
    "occ-cie-2": (3, 2502, 2, 114),
    "occ-cie-3": (5, 1542, 2, 54),
    "occ-cie-4": (5, 2798, 2, 150),
    "occ-cie-5": (9, 3014, 3, 53),
    "occ-cie-6": (9, 4326, 3, 17),
    "occ-cie-7": (10, 359, 3, 27),
    "occ-cie-8": (10, 1551, 3, 125),
}


def preset(name: str, seed: int = 0) -> GenProfile:
    n, t, m, b = PRESETS[name]
    return GenProfile(n, t, m, b, seed)


def _split(rng, total: int, parts: int) -> list[int]:
    """Seeded multinomial split of ``total`` into ``parts`` positive counts."""
    if parts == 0:
        return []
    extra = rng.multinomial(total - parts, np.full(parts, 1.0 / parts))
    return [1 + int(e) for e in extra]


def _r2(v: float) -> float:
    return round(float(v), 2)


def generate_instance(p: GenProfile) -> Instance:
    rng = np.random.default_rng(p.seed)
    c = p.container
    lengths = [v for v in p.lengths if v <= c.depth] or [c.depth]
    tubes = []
    for i, count in enumerate(_split(rng, p.total_tubes, p.n_tube_types), start=1):
        hi = min(p.ediam_range[1], c.width, c.height) - 1.0
        ediam = _r2(rng.uniform(min(p.ediam_range[0], hi), hi))
        idiam = min(_r2(ediam * rng.uniform(*p.bore_ratio)), _r2(ediam - 0.01))
        length = float(lengths[int(rng.integers(len(lengths)))])
        tubes.append(TubeType(f"T{i}", idiam, ediam, length, count))
    boxes = []
    for i, count in enumerate(_split(rng, p.total_boxes, p.n_box_types), start=1):
        lo, hi = p.box_side_range
        hi = min(hi, c.width, c.height, c.depth)
        w, h, d = (float(int(rng.integers(int(min(lo, hi)), int(hi) + 1))) for _ in range(3))
        boxes.append(BoxType(f"B{i}", w, h, d, count))
    return Instance(c, tuple(tubes), tuple(boxes))
