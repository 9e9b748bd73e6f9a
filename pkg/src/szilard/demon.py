"""The (N+1)-level memory: level energies, initial populations and the
controlled measurement permutations ``f_i``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError
from .statmech import shannon

__all__ = [
    "MapFamily",
    "MapViolation",
    "DemonSpec",
    "JointDistribution",
    "default_map",
    "validate_map",
    "inverse_map",
    "post_measurement_joint",
    "measurement_work",
    "entropy_gain",
]


@dataclass(frozen=True)
class MapFamily:
    """Table ``f[i][j]``: demon state ``j`` is sent to ``f[i][j]`` when ``i`` particles are on the right."""

    table: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(tuple(int(v) for v in row) for row in self.table))

    @property
    def size(self) -> int:
        return len(self.table)

    def __getitem__(self, i: int) -> tuple[int, ...]:
        return self.table[i]


@dataclass(frozen=True)
class MapViolation:
    kind: str  # "anchoring" | "permutation" | "shape"
    i: int
    j: int

    def __str__(self) -> str:
        return f"map violates {self.kind} at (i={self.i}, j={self.j})"


def default_map(n: int) -> MapFamily:
    """``f_i(j) = (i + j) mod (N + 1)``."""
    if n < 1:
        raise DomainError(f"N must be >= 1, got {n}")
    m = n + 1
    return MapFamily(tuple(tuple((i + j) % m for j in range(m)) for i in range(m)))


def validate_map(fam: MapFamily) -> MapViolation | None:
    """Return ``None`` for a valid family, else the first violation found (row-major)."""
    return _violation(fam, anchored=True)


def _violation(fam: MapFamily, anchored: bool) -> MapViolation | None:
    m = fam.size
    for i, row in enumerate(fam.table):
        if len(row) != m:
            return MapViolation("shape", i, min(len(row), m))
        if anchored and row[0] != i:
            return MapViolation("anchoring", i, 0)
        seen: set[int] = set()
        for j, v in enumerate(row):
            if not (0 <= v < m) or v in seen:
                return MapViolation("permutation", i, j)
            seen.add(v)
    return None


def inverse_map(fam: MapFamily) -> MapFamily:
    """Row-wise inverse permutation.  Inverses need not satisfy anchoring, so only the rows are checked."""
    bad = _violation(fam, anchored=False)
    if bad is not None:
        raise DomainError(str(bad))
    inv = []
    for row in fam.table:
        g = [0] * len(row)
        for j, v in enumerate(row):
            g[v] = j
        inv.append(tuple(g))
    return MapFamily(tuple(inv))


@dataclass(frozen=True)
class DemonSpec:
    levels: tuple[float, ...]
    populations: tuple[float, ...]
    map: MapFamily = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        levels = tuple(float(x) for x in self.levels)
        pops = tuple(float(x) for x in self.populations)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "populations", pops)
        if len(levels) < 2:
            raise DomainError("a demon needs at least two levels")
        if len(pops) != len(levels):
            raise DomainError(f"{len(pops)} populations given for {len(levels)} levels")
        if levels[0] != 0.0:
            raise DomainError(f"level 0 energy must be exactly 0, got {levels[0]!r}")
        if not all(math.isfinite(x) for x in levels):
            raise DomainError("level energies must be finite")
        if any(not (p >= 0.0) or not math.isfinite(p) for p in pops):
            raise DomainError("populations must be finite and non-negative")
        if abs(math.fsum(pops) - 1.0) > 1e-12:
            raise DomainError(f"populations must sum to 1 within 1e-12, got {math.fsum(pops)!r}")
        if self.map is None:
            object.__setattr__(self, "map", default_map(len(levels) - 1))
        if self.map.size != len(levels):
            raise DomainError(f"map acts on {self.map.size} states but the demon has {len(levels)}")
        bad = validate_map(self.map)
        if bad is not None:
            raise DomainError(str(bad))

    @property
    def n(self) -> int:
        return len(self.levels) - 1

    @property
    def p0(self) -> np.ndarray:
        return np.array(self.populations)

    @property
    def deltas(self) -> np.ndarray:
        return np.array(self.levels)

    @property
    def is_pure(self) -> bool:
        return self.populations[0] == 1.0

    @classmethod
    def error_free(cls, n: int, spacing: float = 1.0, fam: MapFamily | None = None) -> DemonSpec:
        return cls(tuple(j * spacing for j in range(n + 1)), (1.0,) + (0.0,) * n, fam)

    @classmethod
    def linear(cls, populations: Sequence[float], spacing: float = 1.0, fam: MapFamily | None = None) -> DemonSpec:
        """Equally spaced levels ``j * spacing`` with the given populations."""
        return cls(tuple(j * spacing for j in range(len(populations))), tuple(populations), fam)


@dataclass(frozen=True)
class JointDistribution:
    """``p[i, j]`` over (right-count branch ``i``, demon record ``j``)."""

    p: np.ndarray

    @property
    def substance_marginal(self) -> np.ndarray:
        return self.p.sum(axis=1)

    @property
    def demon_marginal(self) -> np.ndarray:
        return self.p.sum(axis=0)

    def mutual_information(self) -> float:
        return shannon(self.substance_marginal) + shannon(self.demon_marginal) - shannon(self.p.ravel())


def _weights(demon: DemonSpec, P) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.shape != (demon.n + 1,):
        raise DomainError(f"expected {demon.n + 1} branch probabilities, got shape {P.shape}")
    if abs(P.sum() - 1.0) > 1e-10:
        raise DomainError(f"branch probabilities must sum to 1, got {P.sum()!r}")
    inv = np.array(inverse_map(demon.map).table)
    return P[:, None] * demon.p0[inv]


def post_measurement_joint(demon: DemonSpec, P) -> JointDistribution:
    """``p_ij = P_i * p0[f_i^{-1}(j)]``."""
    return JointDistribution(_weights(demon, P))


def measurement_work(demon: DemonSpec, P) -> float:
    """Energy handed to the memory by the controlled permutation."""
    p1 = post_measurement_joint(demon, P).demon_marginal
    return math.fsum((p1 - demon.p0) * demon.deltas)


def entropy_gain(demon: DemonSpec, P) -> float:
    """``H(p1) - H(p0)`` where ``p1`` is the post-measurement memory marginal.

    ``p1`` is a convex mixture of permutations of ``p0``; writing it as the
    dominant permutation plus a small correction keeps the difference accurate
    when it is far below the entropies themselves.
    """
    P = np.asarray(P, dtype=float)
    inv = np.array(inverse_map(demon.map).table)
    p0 = demon.p0
    star = int(np.argmax(P))
    a = p0[inv[star]]
    d = np.zeros_like(a)
    for i in range(len(P)):
        if i != star and P[i] > 0.0:
            d += P[i] * (p0[inv[i]] - a)
    total = a + d
    terms = []
    for aj, dj, tj in zip(a, d, total):
        if tj <= 0.0:
            continue
        if aj > 0.0 and abs(dj) <= aj:
            terms.append(dj * math.log(tj) + aj * math.log1p(dj / aj))
        else:
            # large relative change: the plain form loses nothing
            terms.append(tj * math.log(tj) - (aj * math.log(aj) if aj > 0.0 else 0.0))
    # H(a) equals H(p0) because a is a permutation of p0
    return -math.fsum(terms)
