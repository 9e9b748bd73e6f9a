"""Low-temperature structure and (l, T1) grid sweeps."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .config import OPTIMIZE, EngineConfig
from .cycle import run_cycle
from .demon import DemonSpec
from .errors import DomainError, PrecisionError, SzilardError
from .optimize import optimize_positions
from .statmech import DEFAULT_TRUNCATION_EPS, Statistics, split_state

__all__ = [
    "degenerate_points",
    "w_over_t",
    "ZeroTemperatureReport",
    "zero_temperature_limit_report",
    "Grid",
    "SweepSpec",
    "SweepRow",
    "SweepTable",
    "SweepError",
    "sweep",
    "check_row",
]


def degenerate_points(n: int, stats: Statistics) -> list[float]:
    """Insertion positions where the split N-particle ground state is degenerate."""
    if n < 1:
        raise DomainError(f"N must be >= 1, got {n}")
    if Statistics(stats) is Statistics.BOSE or n == 1:
        return [0.5]
    return [i / (n + 1) for i in range(1, n + 1)]


def w_over_t(cfg: EngineConfig) -> float:
    """``W / T1`` for an error-free engine with a zero-temperature sink.

    Branch ``i`` always lands in record ``i``, so the ratio is
    ``sum_i P_i(l) ln(P_i(l_i) / P_i(l))``.
    """
    if cfg.t2 != 0.0:
        raise DomainError("w_over_t needs t2 = 0")
    if not cfg.demon.is_pure:
        raise DomainError("w_over_t needs an error-free (pure) demon")
    positions = optimize_positions(cfg).positions if cfg.expansion == OPTIMIZE else cfg.expansion
    base = split_state(cfg.n, cfg.l, cfg.beta1, cfg.stats, cfg.truncation_eps)
    P = base.probabilities
    terms = []
    for i in range(cfg.n + 1):
        if P[i] <= 0.0:
            continue
        lp = split_state(cfg.n, positions[cfg.demon.map[i][0]], cfg.beta1, cfg.stats, cfg.truncation_eps).log_p[i]
        terms.append(P[i] * (lp - base.log_p[i]))
    return math.fsum(terms)


@dataclass(frozen=True)
class ZeroTemperatureReport:
    rows: tuple[tuple[float, float], ...]
    limit: float | None

    @property
    def converged(self) -> bool:
        return self.limit is not None

    def describe(self) -> str:
        return "not converged" if self.limit is None else repr(self.limit)


def zero_temperature_limit_report(n: int, stats: Statistics, l: float, t1_ladder: Sequence[float],
                                  truncation_eps: float = DEFAULT_TRUNCATION_EPS) -> ZeroTemperatureReport:
    """``W/T1`` along a decreasing temperature ladder for the error-free, ``T2 = 0`` engine."""
    ladder = [float(t) for t in t1_ladder]
    if len(ladder) < 2:
        raise DomainError("the temperature ladder needs at least two rungs")
    if any(b >= a for a, b in zip(ladder, ladder[1:])):
        raise DomainError("the temperature ladder must be strictly decreasing")
    if ladder[-1] < 1e-4:
        raise DomainError("the temperature ladder must stay at or above 1e-4")
    demon = DemonSpec.error_free(n)
    rows = []
    for t in ladder:
        cfg = EngineConfig(n, stats, t, 0.0, l, demon, OPTIMIZE, truncation_eps)
        rows.append((t, w_over_t(cfg)))
    limit = rows[-1][1] if abs(rows[-1][1] - rows[-2][1]) < 1e-6 else None
    return ZeroTemperatureReport(tuple(rows), limit)


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class Grid:
    count: int
    min: float
    max: float
    spacing: str = "linear"

    def __post_init__(self):
        if self.count < 1:
            raise DomainError("grid count must be >= 1")
        if self.spacing not in ("linear", "log"):
            raise DomainError(f"unknown grid spacing {self.spacing!r}")
        if self.max < self.min:
            raise DomainError("grid max must not be below grid min")
        if self.spacing == "log" and self.min <= 0.0:
            raise DomainError("log-spaced grids need a positive minimum")

    def values(self) -> list[float]:
        if self.count == 1:
            return [self.min]
        m = self.count - 1
        if self.spacing == "log":
            ratio = math.log(self.max / self.min)
            return [self.min * math.exp(ratio * k / m) for k in range(self.count)]
        return [self.min + (self.max - self.min) * k / m for k in range(self.count)]


@dataclass(frozen=True)
class SweepSpec:
    n: int
    stats: Statistics
    demon: DemonSpec
    t2: float
    l_grid: Grid
    t1_grid: Grid
    expansion: object = OPTIMIZE
    truncation_eps: float = DEFAULT_TRUNCATION_EPS

    def __post_init__(self):
        object.__setattr__(self, "stats", Statistics(self.stats))
        if not (0.0 < self.l_grid.min and self.l_grid.max < 1.0):
            raise DomainError("insertion grid must lie strictly inside (0, 1)")
        if not (self.t1_grid.min > 0.0):
            raise DomainError("t1 grid minimum must be positive")
        if self.t2 == 0.0 and not self.demon.is_pure:
            raise DomainError("t2 = 0 needs a pure initial memory state")

    def configs(self):
        for l in self.l_grid.values():
            for t1 in self.t1_grid.values():
                yield EngineConfig(self.n, self.stats, t1, self.t2, l, self.demon, self.expansion, self.truncation_eps)


@dataclass(frozen=True)
class SweepRow:
    l: float
    t1: float
    w: float
    w_over_t1: float
    q1: float
    q2: float
    eta: float | None
    first_law_residual: float


@dataclass(frozen=True)
class SweepTable:
    spec: SweepSpec
    rows: tuple[SweepRow, ...]


class SweepError(PrecisionError):
    def __init__(self, l: float, t1: float, reason: str):
        super().__init__(f"sweep node (l={l!r}, t1={t1!r}) failed: {reason}")
        self.l = l
        self.t1 = t1
        self.reason = reason

    def __reduce__(self):
        return (SweepError, (self.l, self.t1, self.reason))


def check_row(report) -> str | None:
    """Name the first cycle invariant a report breaks, if any."""
    cfg = report.config
    if not math.isfinite(report.w) or not math.isfinite(report.q1):
        return "non-finite totals"
    if abs(report.first_law_residual) > 1e-9 * max(1.0, abs(report.q1)):
        return f"first-law residual {report.first_law_residual!r}"
    if report.q2 < -1e-12:
        return f"negative sink heat {report.q2!r}"
    if report.q1 > report.q1_upper_bound + 1e-10:
        return f"Q1 {report.q1!r} above bound {report.q1_upper_bound!r}"
    if report.eta is not None and report.eta > 1.0 - cfg.t2 / cfg.t1 + 1e-9:
        return f"efficiency {report.eta!r} above the Carnot value"
    return None


def _node(cfg: EngineConfig) -> SweepRow:
    try:
        rep = run_cycle(cfg)
    except SzilardError as exc:
        raise SweepError(cfg.l, cfg.t1, str(exc)) from exc
    bad = check_row(rep)
    if bad is not None:
        raise SweepError(cfg.l, cfg.t1, bad)
    return SweepRow(cfg.l, cfg.t1, rep.w, rep.w_over_t1, rep.q1, rep.q2, rep.eta, rep.first_law_residual)


def sweep(spec: SweepSpec, threads: int = 1) -> SweepTable:
    """Run the cycle at every grid node; rows are ordered l-major, T1-minor.

    ``threads`` > 1 farms nodes out to worker processes (0 picks the CPU
    count); the row order never depends on completion order.
    """
    if threads < 0:
        raise DomainError("threads must be >= 0")
    workers = (os.cpu_count() or 1) if threads == 0 else threads
    cfgs = list(spec.configs())
    if workers <= 1 or len(cfgs) < 2:
        rows = [_node(c) for c in cfgs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_node, cfgs, chunksize=max(1, len(cfgs) // (4 * workers))))
    return SweepTable(spec, tuple(rows))
