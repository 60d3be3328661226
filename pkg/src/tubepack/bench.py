"""Batch solving of instance files with a summary table."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .io_format import parse_instance
from .partition import solve

COLUMNS = ("instance", "N", "T", "M", "B", "C", "CPU", "fill", "unpacked", "error")


@dataclass
class BenchRow:
    instance: str
    n_tube_types: int = 0
    total_tubes: int = 0
    n_box_types: int = 0
    total_boxes: int = 0
    containers: Optional[int] = None
    cpu: float = 0.0
    fill: list[float] = field(default_factory=list)
    unpacked: int = 0
    error: str = ""

    def cells(self) -> list[str]:
        fill = " ".join(f"{f:.3f}" for f in self.fill)
        return [self.instance, str(self.n_tube_types), str(self.total_tubes), str(self.n_box_types),
                str(self.total_boxes), "" if self.containers is None else str(self.containers),
                f"{self.cpu:.2f}", fill, str(self.unpacked), self.error]


def bench(paths: Sequence[Path], time_limit: float = 30.0, seed: int = 0,
          wallclock: bool = False) -> list[BenchRow]:
    """Solve each file; a failing instance yields an error row and the batch goes on."""
    rows = []
    for path in paths:
        row = BenchRow(Path(path).name)
        try:
            inst = parse_instance(Path(path).read_text())
            row.n_tube_types = sum(1 for t in inst.tubes if t.count)
            row.total_tubes = inst.total_tubes
            row.n_box_types = sum(1 for b in inst.boxes if b.count)
            row.total_boxes = inst.total_boxes
            start = time.perf_counter()
            sol = solve(inst, seed=seed, time_limit=time_limit, wallclock=wallclock)
            row.cpu = time.perf_counter() - start
            row.containers = sol.containers_used
            row.fill = list(sol.metrics["fill_ratio"])
            row.unpacked = sum(sol.unpacked_tubes.values()) + sum(sol.unpacked_boxes.values())
        except Exception as exc:  # one bad row must not stop the batch
            row.error = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows


def format_table(rows: Sequence[BenchRow]) -> str:
    table = [list(COLUMNS)] + [r.cells() for r in rows]
    widths = [max(len(r[k]) for r in table) for k in range(len(COLUMNS))]
    lines = []
    for r in table:
        lines.append("  ".join(cell.ljust(widths[k]) if k in (0, 7, 9) else cell.rjust(widths[k])
                               for k, cell in enumerate(r)).rstrip())
    return "\n".join(lines) + "\n"


def format_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow(r.cells())
    return buf.getvalue()
