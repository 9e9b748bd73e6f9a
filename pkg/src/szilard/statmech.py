"""Canonical thermodynamics of ideal Bose/Fermi gases in 1-D infinite wells.

Reduced units throughout: hbar^2 pi^2 / (2 M L^2) = 1, k_B = 1 and L = 1, so a
well of width ``w`` (a fraction of L) has levels ``E_i = (i / w)^2``.

Every n-particle quantity is stored relative to the exact n-particle ground
state energy ``E0`` (``n * E_1`` for bosons, ``E_1 + ... + E_n`` for fermions):

    Z_n = exp(-beta * E0) * Zt_n,     U_n = E0 + Ut_n,
    S_n = ln Zt_n + beta * Ut_n,      F_n = E0 - ln(Zt_n) / beta.

``Zt_n >= 1`` and ``Ut_n >= 0``, so nothing under- or overflows at very low
temperature.  The production path is the power-sum recursion
``Z_n = (1/n) sum_k s_k P_k Z_{n-k}``; for fermions the alternating signs cancel
catastrophically at low temperature, which is detected from a running error
bound and handled by an exact positive-term evaluation of the occupation sum.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .errors import CapabilityError, DomainError, PrecisionError
from .logscalar import LogScalar

__all__ = [
    "Statistics",
    "Well",
    "SpectrumParams",
    "Ladder",
    "SplitState",
    "single_particle_energies",
    "level_count",
    "power_sum",
    "canonical_partition",
    "canonical_partition_young",
    "brute_force_partition",
    "occupation_count",
    "internal_energy",
    "entropy",
    "free_energy",
    "ladder",
    "right_count_distribution",
    "log_count_probabilities",
    "split_state",
    "shannon",
    "integer_partitions",
]

DEFAULT_TRUNCATION_EPS = 1e-16
# Relative-error budget of the signed recursion before switching paths.
RECURSION_ERROR_BUDGET = 1e-13
BRUTE_FORCE_BUDGET = 10_000_000
YOUNG_MAX_N = 8


class Statistics(str, enum.Enum):
    BOSE = "bose"
    FERMI = "fermi"

    def recursion_sign(self, k: int) -> int:
        if self is Statistics.BOSE:
            return 1
        return 1 if k % 2 == 1 else -1


@dataclass(frozen=True)
class Well:
    width: float

    def __post_init__(self):
        if not (self.width > 0.0) or not math.isfinite(self.width):
            raise DomainError(f"well width must be strictly positive, got {self.width!r}")
        if self.width > 1.0:
            raise DomainError(f"well width is a fraction of L and must be <= 1, got {self.width!r}")


def _check_eps(eps: float) -> float:
    if not (0.0 < eps <= 1e-8):
        raise DomainError(f"truncation_eps must lie in (0, 1e-8], got {eps!r}")
    return float(eps)


def _check_beta(beta: float) -> float:
    if not (beta > 0.0) or not math.isfinite(beta):
        raise DomainError(f"beta must be finite and positive, got {beta!r}")
    return float(beta)


@dataclass(frozen=True)
class SpectrumParams:
    well: Well
    beta: float
    truncation_eps: float = DEFAULT_TRUNCATION_EPS

    def __post_init__(self):
        _check_beta(self.beta)
        _check_eps(self.truncation_eps)

    @classmethod
    def of(cls, width: float, beta: float, truncation_eps: float = DEFAULT_TRUNCATION_EPS):
        return cls(Well(width), beta, truncation_eps)


def single_particle_energies(well: Well, count: int) -> list[float]:
    """Levels ``(i / width)**2`` for ``i = 1..count``."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    return [(i / well.width) ** 2 for i in range(1, count + 1)]


def shannon(p) -> float:
    """Shannon entropy in nats with the 0 ln 0 = 0 convention."""
    p = np.asarray(p, dtype=float)
    nz = p[p > 0.0]
    return float(-np.sum(nz * np.log(nz)))


# ---------------------------------------------------------------------------
# spectrum truncation and power sums


def _formula_levels(n: int, width: float, beta: float, eps: float) -> int:
    temp = 1.0 / beta
    return n + math.ceil(width * math.sqrt(max(1.0, temp) * math.log(1.0 / eps))) + 8


@lru_cache(maxsize=4096)
def level_count(n: int, width: float, beta: float, eps: float = DEFAULT_TRUNCATION_EPS) -> int:
    """Number of single-particle levels kept for ``n`` particles in a well.

    Starts from ``n + ceil(w sqrt(max(1, T) ln(1/eps))) + 8`` and doubles until
    doubling again changes the single-particle sum by less than 1e-12.
    """
    m = _formula_levels(n, width, beta, eps)
    for _ in range(30):
        i = np.arange(1, 2 * m + 1, dtype=float)
        terms = np.exp(-beta * ((i / width) ** 2 - (1.0 / width) ** 2))
        head = terms[:m].sum()
        tail = terms[m:].sum()
        if tail < 1e-12 * head:
            return m
        m *= 2
    raise PrecisionError(f"spectrum truncation did not converge (width={width}, beta={beta})")


def power_sum(params: SpectrumParams, j: int) -> LogScalar:
    """``P_j = sum_i exp(-j beta E_i)`` as a positive LogScalar."""
    if j < 1:
        raise DomainError(f"power-sum order must be >= 1, got {j}")
    w, beta = params.well.width, params.beta
    m = level_count(max(j, 1), w, beta, params.truncation_eps)
    i = np.arange(1, m + 1, dtype=float)
    shifted = (i / w) ** 2 - (1.0 / w) ** 2
    total = np.exp(-j * beta * shifted).sum()
    return LogScalar(1, -j * beta * (1.0 / w) ** 2 + math.log(total))


# ---------------------------------------------------------------------------
# batched ladders Z_0..Z_n for many widths at once


@dataclass(frozen=True)
class Ladder:
    """Thermodynamics of 0..n_max particles in one well at one temperature.

    Arrays are indexed by particle number.  An empty well (width 0) holds only
    the zero-particle state; larger counts have ``ground = inf``.
    """

    beta: float
    ground: np.ndarray
    log_zt: np.ndarray
    excess: np.ndarray

    @property
    def log_z(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return np.where(np.isfinite(self.ground), -self.beta * self.ground + self.log_zt, -np.inf)

    @property
    def energy(self) -> np.ndarray:
        return self.ground + self.excess

    @property
    def entropy(self) -> np.ndarray:
        return np.where(np.isfinite(self.ground), self.log_zt + self.beta * self.excess, 0.0)

    @property
    def free_energy(self) -> np.ndarray:
        return self.ground - self.log_zt / self.beta


def _readonly(*arrays):
    for a in arrays:
        a.setflags(write=False)


def _row_lse(stack: np.ndarray) -> np.ndarray:
    """log-sum-exp over axis 0 of a (k, rows) array, -inf safe."""
    top = stack.max(axis=0)
    safe = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(under="ignore"):
        s = np.exp(stack - safe).sum(axis=0)
    with np.errstate(divide="ignore"):
        return np.where(np.isfinite(top), safe + np.log(s), -np.inf)


def _ladder_arrays(widths: np.ndarray, beta: float, n_max: int, stats: Statistics, eps: float):
    widths = np.asarray(widths, dtype=float)
    rows = widths.shape[0]
    ground = np.zeros((rows, n_max + 1))
    log_zt = np.zeros((rows, n_max + 1))
    excess = np.zeros((rows, n_max + 1))
    if n_max == 0 or rows == 0:
        return ground, log_zt, excess
    empty = widths <= 0.0
    w = np.where(empty, 1.0, widths)
    m = level_count(n_max, float(w.max()), beta, eps)
    idx = np.arange(1, m + 1, dtype=float)
    energies = (idx[None, :] / w[:, None]) ** 2
    shifted = energies - energies[:, :1]
    logx = -beta * shifted

    # shifted power sums (>= 1) and their mean shifted energies
    log_p = np.empty((n_max + 1, rows))
    mean_e = np.empty((n_max + 1, rows))
    with np.errstate(under="ignore"):
        for k in range(1, n_max + 1):
            terms = np.exp(k * logx)
            tot = terms.sum(axis=1)
            log_p[k] = np.log(tot)
            mean_e[k] = (terms * shifted).sum(axis=1) / tot

    lz = np.zeros((n_max + 1, rows))
    uu = np.zeros((n_max + 1, rows))
    if stats is Statistics.BOSE:
        for n in range(1, n_max + 1):
            t = np.stack([log_p[k] + lz[n - k] for k in range(1, n + 1)])
            tot = _row_lse(t)
            wts = np.exp(t - tot)
            uu[n] = sum(wts[k - 1] * (k * mean_e[k] + uu[n - k]) for k in range(1, n + 1))
            lz[n] = tot - math.log(n)
        ground[:] = np.arange(n_max + 1)[None, :] * energies[:, :1]
        log_zt[:] = lz.T
        excess[:] = uu.T
    else:
        err = np.zeros((n_max + 1, rows))
        bad = np.zeros(rows, dtype=bool)
        for n in range(1, n_max + 1):
            t = np.stack([log_p[k] + lz[n - k] for k in range(1, n + 1)])
            odd = t[0::2]
            even = t[1::2]
            lp = _row_lse(odd)
            ln = _row_lse(even) if even.shape[0] else np.full(rows, -np.inf)
            with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
                ratio = np.exp(ln - lp)
                ok = ratio < 1.0
                res = np.where(ok, lp + np.log1p(-np.where(ok, ratio, 0.0)), -np.inf)
                lost = lp - res
                prev = err[n - 1::-1][:n].max(axis=0) if n > 1 else np.zeros(rows)
                err[n] = np.exp(lost) * (4 * np.finfo(float).eps + prev)
            bad |= ~ok | ~np.isfinite(err[n]) | (err[n] > RECURSION_ERROR_BUDGET)
            signs = np.array([1.0 if k % 2 else -1.0 for k in range(1, n + 1)])[:, None]
            with np.errstate(invalid="ignore", over="ignore"):
                wts = signs * np.exp(t - res)
                uu[n] = np.where(ok, sum(wts[k - 1] * (k * mean_e[k] + uu[n - k]) for k in range(1, n + 1)), 0.0)
            lz[n] = np.where(ok, res - math.log(n), 0.0)
        fermi_shift = np.concatenate([np.zeros((rows, 1)), np.cumsum(shifted[:, :n_max], axis=1)], axis=1)
        ground[:] = np.arange(n_max + 1)[None, :] * energies[:, :1] + fermi_shift
        with np.errstate(invalid="ignore"):
            log_zt[:] = lz.T + beta * fermi_shift
            excess[:] = uu.T - fermi_shift
        if bad.any():
            lz_b, ex_b = _fermi_occupation_sum(shifted[bad], beta, n_max, eps)
            log_zt[bad] = lz_b
            excess[bad] = ex_b

    if empty.any():
        ground[empty, 1:] = np.inf
        log_zt[empty] = 0.0
        log_zt[empty, 1:] = -np.inf
        excess[empty] = 0.0
    return ground, log_zt, excess


def _fermi_occupation_sum(shifted: np.ndarray, beta: float, n_max: int, eps: float):
    """Fermi ladder by adding one level at a time to prod_i (1 + x_i t).

    Every term is positive, so nothing cancels.  The sum for ``m`` particles
    is kept relative to its own ground configuration (the lowest ``m``
    levels), which makes ``ln Zt_m`` and the excess energy come out directly
    instead of as small differences of large numbers.  Returns arrays shaped
    (rows, n_max + 1).
    """
    rows, m = shifted.shape
    # levels whose occupation is negligible for every row are dropped
    rel = -beta * (shifted - shifted[:, n_max - 1:n_max])
    keep = np.nonzero((rel > math.log(eps) - 40.0).any(axis=0))[0]
    m_eff = max(int(keep.max()) + 1 if keep.size else n_max, n_max)
    le = np.full((rows, n_max + 1), -np.inf)
    le[:, 0] = 0.0
    ex = np.zeros((rows, n_max + 1))
    with np.errstate(invalid="ignore", under="ignore"):
        for lev in range(m_eff):
            top = min(lev + 1, n_max)
            gap = shifted[:, lev:lev + 1] - shifted[:, :top]
            a = le[:, 1:top + 1]
            b = -beta * gap + le[:, :top]
            new = np.logaddexp(a, b)
            fin = np.isfinite(new)
            ref = np.where(fin, new, 0.0)
            wa = np.where(fin, np.exp(a - ref), 0.0)
            wb = np.where(fin, np.exp(b - ref), 0.0)
            ex[:, 1:top + 1] = wa * ex[:, 1:top + 1] + wb * (ex[:, :top] + gap)
            le[:, 1:top + 1] = new
    if not np.isfinite(le).all():
        raise PrecisionError("Fermi occupation sum has fewer levels than particles")
    return le, ex


def _ladders(widths, beta: float, n_max: int, stats: Statistics, eps: float):
    g, lz, ex = _ladder_arrays(np.atleast_1d(np.asarray(widths, dtype=float)), beta, n_max, stats, eps)
    return g, lz, ex


@lru_cache(maxsize=65536)
def _ladder_cached(width: float, beta: float, n_max: int, stats: Statistics, eps: float) -> Ladder:
    g, lz, ex = _ladders([width], beta, n_max, stats, eps)
    row = Ladder(beta, g[0].copy(), lz[0].copy(), ex[0].copy())
    _readonly(row.ground, row.log_zt, row.excess)
    return row


def ladder(width: float, beta: float, n_max: int, stats: Statistics,
           truncation_eps: float = DEFAULT_TRUNCATION_EPS) -> Ladder:
    """Thermodynamics of 0..n_max particles in a well of the given width.

    ``width = 0`` is accepted and denotes the empty-compartment limit.
    """
    if width < 0.0 or width > 1.0:
        raise DomainError(f"width must lie in [0, 1], got {width!r}")
    if n_max < 0:
        raise DomainError(f"particle count must be >= 0, got {n_max}")
    return _ladder_cached(float(width), _check_beta(beta), int(n_max), Statistics(stats), _check_eps(truncation_eps))


# ---------------------------------------------------------------------------
# single-well public operations


def _single(n: int, params: SpectrumParams, stats: Statistics) -> tuple[float, float, float]:
    if n < 0:
        raise DomainError(f"particle count must be >= 0, got {n}")
    lad = ladder(params.well.width, params.beta, n, stats, params.truncation_eps)
    return float(lad.ground[n]), float(lad.log_zt[n]), float(lad.excess[n])


def canonical_partition(n: int, params: SpectrumParams, stats: Statistics) -> LogScalar:
    """``Z_n`` from the power-sum recursion, as a positive LogScalar."""
    ground, log_zt, _ = _single(n, params, Statistics(stats))
    return LogScalar(1, -params.beta * ground + log_zt)


def internal_energy(n: int, params: SpectrumParams, stats: Statistics) -> float:
    """``U_n = -d ln Z_n / d beta`` from the differentiated recursion."""
    ground, _, excess = _single(n, params, Statistics(stats))
    return ground + excess


def entropy(n: int, params: SpectrumParams, stats: Statistics) -> float:
    """``S_n = ln Z_n + beta U_n`` (the ground-state energy cancels exactly)."""
    _, log_zt, excess = _single(n, params, Statistics(stats))
    return log_zt + params.beta * excess


def free_energy(n: int, params: SpectrumParams, stats: Statistics) -> float:
    """``F_n = -ln(Z_n) / beta``."""
    ground, log_zt, _ = _single(n, params, Statistics(stats))
    return ground - log_zt / params.beta


# ---------------------------------------------------------------------------
# independent oracles


def integer_partitions(n: int, largest: int | None = None):
    """Partitions of ``n`` as dicts ``{part: multiplicity}``, largest part first."""
    if largest is None:
        largest = n
    if n == 0:
        yield {}
        return
    for part in range(min(n, largest), 0, -1):
        for rest in integer_partitions(n - part, part):
            out = dict(rest)
            out[part] = out.get(part, 0) + 1
            yield out


def canonical_partition_young(n: int, params: SpectrumParams, stats: Statistics) -> LogScalar:
    """``Z_n`` as an explicit sum over Young diagrams with ``n`` boxes.

    Each diagram with ``i_a`` rows of length ``a`` contributes
    ``c / z * prod_a P_a**i_a`` with ``z = prod_a i_a! a**i_a``; ``c`` is 1 for
    bosons and ``(-1)**(n - sum_a i_a)`` for fermions.  The alternating Fermi
    sum is evaluated in multiprecision with enough digits to absorb the
    cancellation.
    """
    stats = Statistics(stats)
    if n < 0:
        raise DomainError(f"particle count must be >= 0, got {n}")
    if n > YOUNG_MAX_N:
        raise CapabilityError(f"Young-diagram sum is limited to n <= {YOUNG_MAX_N}, got {n}")
    if n == 0:
        return LogScalar.one()
    w, beta = params.well.width, params.beta
    m = level_count(n, w, beta, params.truncation_eps)
    e = [(i / w) ** 2 for i in range(1, m + 1)]
    digits = 30 + int(2 * n * math.log10(m + 1))
    if stats is Statistics.FERMI:
        excite = sum(e[:n]) - n * e[0]
        digits += int(beta * excite / math.log(10)) + 1
    with mpmath.workdps(digits):
        x = [mpmath.exp(-mpmath.mpf(beta) * (mpmath.mpf(ei) - mpmath.mpf(e[0]))) for ei in e]
        p = {a: mpmath.fsum(xi ** a for xi in x) for a in range(1, n + 1)}
        total = mpmath.mpf(0)
        for diagram in integer_partitions(n):
            z = mpmath.mpf(1)
            prod = mpmath.mpf(1)
            rows = 0
            for a, i_a in diagram.items():
                z *= mpmath.factorial(i_a) * mpmath.mpf(a) ** i_a
                prod *= p[a] ** i_a
                rows += i_a
            c = 1 if stats is Statistics.BOSE or (n - rows) % 2 == 0 else -1
            total += c * prod / z
        if total <= 0:
            raise PrecisionError("Young-diagram sum lost all significance")
        log_total = float(mpmath.log(total))
    return LogScalar(1, log_total - n * beta * e[0])


def occupation_count(n: int, levels: int, stats: Statistics) -> int:
    """Number of occupation vectors with total ``n`` over ``levels`` levels."""
    if Statistics(stats) is Statistics.BOSE:
        return math.comb(levels + n - 1, n)
    return math.comb(levels, n)


def brute_force_partition(n: int, params: SpectrumParams, stats: Statistics, level_cap: int) -> LogScalar:
    """Direct sum of ``exp(-beta sum_i n_i E_i)`` over every occupation vector."""
    stats = Statistics(stats)
    if n < 0:
        raise DomainError(f"particle count must be >= 0, got {n}")
    if level_cap < 1:
        raise DomainError(f"level_cap must be >= 1, got {level_cap}")
    count = occupation_count(n, level_cap, stats)
    if count > BRUTE_FORCE_BUDGET:
        raise CapabilityError(f"{count} occupation vectors exceed the brute-force budget of {BRUTE_FORCE_BUDGET}")
    if n == 0:
        return LogScalar.one()
    if count == 0:
        return LogScalar.zero()
    e = np.array(single_particle_energies(params.well, level_cap))
    pick = itertools.combinations_with_replacement if stats is Statistics.BOSE else itertools.combinations
    chunks = []
    it = pick(range(level_cap), n)
    while True:
        block = list(itertools.islice(it, 200_000))
        if not block:
            break
        chunks.append(e[np.array(block)].sum(axis=1))
    totals = np.concatenate(chunks)
    lowest = totals.min()
    return LogScalar(1, float(-params.beta * lowest + math.log(np.exp(-params.beta * (totals - lowest)).sum())))


# ---------------------------------------------------------------------------
# split well: N particles distributed over widths x and 1 - x


@dataclass(frozen=True)
class SplitState:
    """Well split at ``x``; entry ``i`` has ``N - i`` particles left and ``i`` right.

    Infeasible configurations (particles in an empty compartment) carry
    ``log_p = -inf`` and infinite free energy.
    """

    x: float
    beta: float
    log_p: np.ndarray
    free: np.ndarray
    energy: np.ndarray
    entropy: np.ndarray
    free_total: float
    energy_total: float
    entropy_total: float

    @property
    def probabilities(self) -> np.ndarray:
        return np.exp(self.log_p)

    @property
    def feasible(self) -> np.ndarray:
        return np.isfinite(self.free)


def _log_normalize(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise log-probabilities ``a - lse(a)`` and the row log-normalisers."""
    top = a.max(axis=1)
    arg = a.argmax(axis=1)
    with np.errstate(under="ignore", invalid="ignore"):
        s = np.exp(a - top[:, None])
    s[np.arange(a.shape[0]), arg] = 0.0
    tail = np.log1p(s.sum(axis=1))
    # the dominant entry becomes exactly -log1p(tail), keeping tiny deficits
    with np.errstate(invalid="ignore"):
        return (a - top[:, None]) - tail[:, None], top + tail


def _split_arrays(n: int, xs: np.ndarray, beta: float, stats: Statistics, eps: float):
    widths = np.concatenate([xs, 1.0 - xs])
    g, lz, ex = _ladders(widths, beta, n, stats, eps)
    k = xs.shape[0]
    gl, lzl, exl = g[:k, ::-1], lz[:k, ::-1], ex[:k, ::-1]
    gr, lzr, exr = g[k:], lz[k:], ex[k:]
    ground = gl + gr
    feas = np.isfinite(ground)
    gmin = np.where(feas, ground, np.inf).min(axis=1)
    r = np.where(feas, lzl + lzr, 0.0)
    with np.errstate(invalid="ignore"):
        a = np.where(feas, -beta * (ground - gmin[:, None]) + r, -np.inf)
    log_p, lse = _log_normalize(a)
    return ground, feas, gmin, r, exl + exr, log_p, lse


def log_count_probabilities(n: int, xs, beta: float, stats: Statistics,
                            truncation_eps: float = DEFAULT_TRUNCATION_EPS) -> np.ndarray:
    """``ln P_i(x)`` for every partition position in ``xs`` (shape ``(len(xs), n+1)``).

    Positions may include the endpoints 0 and 1, where the distribution is
    deterministic (all particles on the non-empty side).
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if np.any(xs < 0.0) or np.any(xs > 1.0):
        raise DomainError("partition positions must lie in [0, 1]")
    return _split_arrays(n, xs, _check_beta(beta), Statistics(stats), _check_eps(truncation_eps))[5]


@lru_cache(maxsize=65536)
def _split_cached(n: int, x: float, beta: float, stats: Statistics, eps: float) -> SplitState:
    ground, feas, gmin, r, exc, log_p, lse = _split_arrays(n, np.array([x]), beta, stats, eps)
    ground, feas, r, exc, log_p = ground[0], feas[0], r[0], exc[0], log_p[0]
    free = np.where(feas, ground - r / beta, np.inf)
    energy = np.where(feas, ground + exc, np.inf)
    ent = np.where(feas, r + beta * exc, 0.0)
    p = np.exp(log_p)
    on = p > 0.0
    h = -math.fsum((p[on] * log_p[on]).tolist())
    e_tot = math.fsum((p[on] * energy[on]).tolist())
    s_tot = h + math.fsum((p[on] * ent[on]).tolist())
    f_tot = float(gmin[0] - lse[0] / beta)
    for arr in (log_p, free, energy, ent):
        arr.setflags(write=False)
    return SplitState(x, beta, log_p, free, energy, ent, f_tot, e_tot, s_tot)


def split_state(n: int, x: float, beta: float, stats: Statistics,
                truncation_eps: float = DEFAULT_TRUNCATION_EPS) -> SplitState:
    """Equilibrium of ``n`` particles in a well partitioned at ``x`` in [0, 1]."""
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"partition position must lie in [0, 1], got {x!r}")
    return _split_cached(int(n), float(x), _check_beta(beta), Statistics(stats), _check_eps(truncation_eps))


def clear_caches() -> None:
    level_count.cache_clear()
    _ladder_cached.cache_clear()
    _split_cached.cache_clear()


def right_count_distribution(n: int, l: float, beta: float, stats: Statistics,
                             truncation_eps: float = DEFAULT_TRUNCATION_EPS) -> np.ndarray:
    """Probability of finding ``i`` of ``n`` particles right of a partition at ``l``."""
    if not (0.0 < l < 1.0):
        raise DomainError(f"insertion position must lie strictly inside (0, 1), got {l!r}")
    return split_state(n, l, beta, stats, truncation_eps).probabilities
