from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

from .demon import DemonSpec
from .errors import DomainError
from .statmech import DEFAULT_TRUNCATION_EPS, Statistics, _check_eps

__all__ = ["EngineConfig", "OPTIMIZE"]

OPTIMIZE = "optimize"

Expansion = Union[str, tuple[float, ...]]


@dataclass(frozen=True)
class EngineConfig:
    """One engine: ``n`` particles, hot bath ``t1``, cold bath ``t2``, partition at ``l``.

    ``expansion`` is either ``"optimize"`` or one final piston position per
    demon record.  Positions may sit on an endpoint only when every branch
    reaching it is compatible with an empty compartment; that check happens
    when the cycle runs.
    """

    n: int
    stats: Statistics
    t1: float
    t2: float
    l: float
    demon: DemonSpec
    expansion: Expansion = OPTIMIZE
    truncation_eps: float = DEFAULT_TRUNCATION_EPS

    def __post_init__(self):
        object.__setattr__(self, "stats", Statistics(self.stats))
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"particle count must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not (self.t1 > 0.0) or not math.isfinite(self.t1):
            raise DomainError(f"t1 must be finite and positive, got {self.t1!r}")
        if not (self.t2 >= 0.0) or not math.isfinite(self.t2):
            raise DomainError(f"t2 must be finite and non-negative, got {self.t2!r}")
        if not (0.0 < self.l < 1.0):
            raise DomainError(f"insertion position must lie strictly inside (0, 1), got {self.l!r}")
        if self.demon.n != self.n:
            raise DomainError(f"demon has {self.demon.n + 1} levels but the engine needs {self.n + 1}")
        _check_eps(self.truncation_eps)
        if isinstance(self.expansion, str):
            if self.expansion != OPTIMIZE:
                raise DomainError(f"unknown expansion policy {self.expansion!r}")
        else:
            pos = tuple(float(x) for x in self.expansion)
            if len(pos) != self.n + 1:
                raise DomainError(f"need {self.n + 1} expansion positions, got {len(pos)}")
            for j, x in enumerate(pos):
                if not (0.0 <= x <= 1.0):
                    raise DomainError(f"expansion position l_{j} = {x!r} lies outside [0, 1]")
            object.__setattr__(self, "expansion", pos)

    @property
    def beta1(self) -> float:
        return 1.0 / self.t1

    def with_positions(self, positions: Sequence[float]) -> EngineConfig:
        return EngineConfig(self.n, self.stats, self.t1, self.t2, self.l, self.demon,
                            tuple(positions), self.truncation_eps)
