"""Derived metrics: miss density, slowdown, correlation, and the
same-bank-different-row analytic latency model used to cross-check
parameter sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .timing import TimingParams


@dataclass
class SimReport:
    """Counters accumulated over one simulation run."""

    total_core_cycles: int = 0
    reads: int = 0
    writes: int = 0
    hits: int = 0
    empties: int = 0
    misses: int = 0
    total_instructions: int = 0
    latency_ns_by_class: dict[str, float] = field(
        default_factory=lambda: {"hit": 0.0, "empty": 0.0, "miss": 0.0})
    policy_final_idle: int = 0

    @property
    def accesses(self) -> int:
        return self.reads + self.writes

    @property
    def rbmpki(self) -> float:
        return rbmpki(self.misses, self.total_instructions)

    def avg_latency_ns(self) -> dict[str, float | None]:
        counts = {"hit": self.hits, "empty": self.empties, "miss": self.misses}
        return {cls: (self.latency_ns_by_class[cls] / n if n else None)
                for cls, n in counts.items()}

    def to_json_dict(self) -> dict:
        return {
            "total_core_cycles": self.total_core_cycles,
            "reads": self.reads,
            "writes": self.writes,
            "hits": self.hits,
            "empties": self.empties,
            "misses": self.misses,
            "rbmpki": self.rbmpki,
            "avg_latency_ns": self.avg_latency_ns(),
            "policy_final_idle": self.policy_final_idle,
        }


@dataclass(frozen=True)
class ComparisonReport:
    t_default: int
    t_prac: int

    @property
    def overhead(self) -> float:
        return overhead(self.t_default, self.t_prac)


def rbmpki(misses: int, instructions: int) -> float:
    """Row-buffer misses per thousand instructions."""
    if instructions <= 0:
        raise ValueError(f"instructions must be positive, got {instructions}")
    return misses / (instructions / 1000)


def overhead(t_default: float, t_prac: float) -> float:
    """Relative slowdown (t_prac - t_default) / t_default; negative means speedup."""
    if t_default <= 0:
        raise ValueError(f"baseline cycles must be positive, got {t_default}")
    return (t_prac - t_default) / t_default


def pearson(xs: list[float], ys: list[float]) -> float:
    """Sample Pearson correlation coefficient."""
    if len(xs) != len(ys):
        raise ValueError(f"series lengths differ: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < 2:
        raise ValueError("need at least two points")
    mean_x = math.fsum(xs) / n
    mean_y = math.fsum(ys) / n
    dx = [x - mean_x for x in xs]
    dy = [y - mean_y for y in ys]
    var_x = math.fsum(d * d for d in dx)
    var_y = math.fsum(d * d for d in dy)
    if var_x == 0 or var_y == 0:
        raise ValueError("constant series has no defined correlation")
    cov = math.fsum(a * b for a, b in zip(dx, dy))
    return cov / math.sqrt(var_x * var_y)


def log_correlation(rbmpkis: list[float], overheads: list[float]) -> tuple[float | None, int]:
    """Pearson r of (log rbmpki, overhead), excluding zero-rbmpki points.

    Returns (r, excluded_count); r is None when fewer than three usable
    points remain.  Zero points are excluded rather than epsilon-shifted.
    """
    pairs = [(math.log(m), oh) for m, oh in zip(rbmpkis, overheads) if m > 0]
    excluded = len(rbmpkis) - len(pairs)
    if len(pairs) < 3:
        return None, excluded
    xs, ys = zip(*pairs)
    return pearson(list(xs), list(ys)), excluded


def sbdr_oracle(params: TimingParams) -> float:
    """Steady-state per-access period of the same-bank different-row loop, in ns.

    The loop's activate-to-activate critical path: the open row is
    precharged once the activate-to-precharge minimum and the
    read-to-precharge tail are both satisfied, then the next activate
    waits out the precharge.  Reducing the activate-to-precharge minimum
    below t_rcd + t_rtp therefore cannot shorten the loop.
    """
    return max(params.t_ras, params.t_rcd + params.t_rtp) + params.t_rp


def sbdr_oracle_cycles(params: TimingParams) -> int:
    """sbdr_oracle evaluated on cycle-quantized parameters.

    Matches the engine's integer-cycle schedule exactly when the three
    named constraints are the binding ones.
    """
    cyc = params.to_cycles()
    return max(cyc.t_ras, cyc.t_rcd + cyc.t_rtp) + cyc.t_rp
