"""Search budgets.

A budget is a quota of search nodes rather than seconds so that results do
not depend on machine speed.  ``Budget.from_seconds`` converts a time limit
using a fixed calibration rate; ``wallclock=True`` opts into a real deadline.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

NODES_PER_SECOND = 50_000
MIN_QUANTUM_SECONDS = 0.05


@dataclass
class Budget:
    total: int
    used: int = 0
    deadline: Optional[float] = None  # time.monotonic() value, wallclock mode only

    @classmethod
    def from_seconds(cls, seconds: float, wallclock: bool = False,
                     rate: int = NODES_PER_SECOND) -> "Budget":
        if seconds < 0:
            raise ValueError("budget must be non-negative")
        if wallclock:
            return cls(total=int(seconds * rate), deadline=time.monotonic() + seconds)
        return cls(total=int(round(seconds * rate)))

    @classmethod
    def nodes(cls, n: int) -> "Budget":
        return cls(total=max(0, int(n)))

    @property
    def remaining(self) -> int:
        return max(0, self.total - self.used)

    @property
    def exhausted(self) -> bool:
        if self.deadline is not None:
            return time.monotonic() >= self.deadline
        return self.used >= self.total

    def charge(self, n: int) -> None:
        self.used += n


def split_budget(budget: Budget, pending_items: int, call_items: int,
                 quantum: int = int(MIN_QUANTUM_SECONDS * NODES_PER_SECOND)) -> Budget:
    """Carve a sub-budget for a call that handles ``call_items`` of the
    ``pending_items`` still waiting.

    The share is proportional, floored at ``quantum`` and capped at what is
    left, so grants over sequential calls never exceed the total.  The caller
    charges the parent with the child's ``used`` afterwards.
    """
    remaining = budget.remaining
    if pending_items <= 0:
        share = remaining
    else:
        share = remaining * min(call_items, pending_items) // pending_items
    grant = min(remaining, max(quantum, share))
    deadline = None
    if budget.deadline is not None:
        now = time.monotonic()
        left = max(0.0, budget.deadline - now)
        frac = 1.0 if pending_items <= 0 else min(1.0, call_items / pending_items)
        deadline = now + max(min(left, MIN_QUANTUM_SECONDS), left * frac)
    return Budget(total=grant, deadline=deadline)
