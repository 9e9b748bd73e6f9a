"""Expansion positions that maximise the heat drawn from the hot bath.

The hot-bath heat splits into a constant plus one term per demon record,

    Q1 / T1 = H(P(l)) + sum_j g_j(l_j),   g_j(x) = sum_i w_ij ln P_i(x),

so each piston position is found by an independent scalar search.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import EngineConfig
from .demon import entropy_gain, post_measurement_joint
from .errors import DomainError, PrecisionError
from . import statmech
from .statmech import Statistics, log_count_probabilities, split_state

__all__ = [
    "OptimizationResult",
    "branch_weights",
    "branch_objective",
    "optimize_positions",
    "single_particle_closed_form",
    "q1_upper_bound",
    "q1_from_positions",
    "golden_section_max",
    "clear_caches",
]

SCAN_POINTS = 201
MAX_SCAN_POINTS = 3201
DENSIFY_GAIN = 1e-9
REFINE_WIDTH = 1e-10
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizationResult:
    positions: tuple[float, ...]
    q1: float
    q1_bound: float
    gap: float
    objectives: tuple[float, ...]


def branch_weights(cfg: EngineConfig) -> np.ndarray:
    """``w[i, j] = P_i(l) p0[f_i^{-1}(j)]``; sums to one."""
    P = split_state(cfg.n, cfg.l, cfg.beta1, cfg.stats, cfg.truncation_eps).probabilities
    return post_measurement_joint(cfg.demon, P).p


def _weighted_log(weights: np.ndarray, log_p: np.ndarray) -> float:
    mask = weights > 0.0
    if not mask.any():
        return 0.0
    return math.fsum(weights[mask] * log_p[mask])


def branch_objective(cfg: EngineConfig, j: int, x: float) -> float:
    """``g_j(x)``; ``-inf`` if the branch puts weight on a configuration impossible at ``x``."""
    if not (0 <= j <= cfg.n):
        raise DomainError(f"demon record j={j} out of range")
    w = branch_weights(cfg)[:, j]
    lp = split_state(cfg.n, x, cfg.beta1, cfg.stats, cfg.truncation_eps).log_p
    return _weighted_log(w, lp)


def q1_from_positions(cfg: EngineConfig, positions) -> float:
    """Closed-form hot-bath heat, in the ratio form ``T1 sum w_ij ln(P_i(l_j)/P_i(l))``."""
    w = branch_weights(cfg)
    base = split_state(cfg.n, cfg.l, cfg.beta1, cfg.stats, cfg.truncation_eps).log_p
    terms = []
    for j, x in enumerate(positions):
        lp = split_state(cfg.n, x, cfg.beta1, cfg.stats, cfg.truncation_eps).log_p
        for i in range(cfg.n + 1):
            if w[i, j] > 0.0:
                terms.append(w[i, j] * (lp[i] - base[i]))
    return cfg.t1 * math.fsum(terms)


def q1_upper_bound(cfg: EngineConfig) -> float:
    """``T1 [H(p1) - H(p0)]`` with ``p1`` the post-measurement memory marginal."""
    P = split_state(cfg.n, cfg.l, cfg.beta1, cfg.stats, cfg.truncation_eps).probabilities
    return cfg.t1 * entropy_gain(cfg.demon, P)


def golden_section_max(f, a: float, b: float, tol: float = REFINE_WIDTH):
    """Maximise ``f`` on ``[a, b]``; returns the best ``(x, f(x))`` seen, ties to smaller x."""
    best = [math.nan, -math.inf]

    def ev(x):
        v = f(x)
        if v > best[1] or (v == best[1] and x < best[0]):
            best[0], best[1] = x, v
        return v

    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = ev(c), ev(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = ev(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = ev(d)
    return best[0], best[1]


@lru_cache(maxsize=512)
def _grid_log_p(n: int, points: int, beta: float, stats: Statistics, eps: float) -> np.ndarray:
    xs = np.arange(points) / (points - 1)
    lp = log_count_probabilities(n, xs, beta, stats, eps)
    lp.setflags(write=False)
    return lp


def _objectives(lp: np.ndarray, omegas: np.ndarray) -> np.ndarray:
    """``vals[k, b] = sum_i omegas[b, i] lp[k, i]`` with ``0 * -inf = 0``."""
    fin = np.where(np.isfinite(lp), lp, 0.0)
    vals = fin @ omegas.T
    # any weight on an impossible configuration makes the objective -inf
    dead = (~np.isfinite(lp)).astype(float) @ (omegas > 0.0).T.astype(float)
    return np.where(dead > 0.0, -np.inf, vals)


def _batched_golden(n, beta, stats, eps, omegas: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """Golden-section maximisation of every branch at once.

    Branch ``b`` searches ``[lo[b], hi[b]]``; each iteration evaluates one new
    point per branch in a single vectorised call.  Returns the best point seen
    per branch (ties to the smaller x).
    """
    rows = np.arange(omegas.shape[0])

    def ev(xs):
        lp = log_count_probabilities(n, xs, beta, stats, eps)
        return _objectives(lp, omegas)[rows, rows]

    a, b = lo.copy(), hi.copy()
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = ev(c)
    fd = ev(d)
    best_x = np.where(fd > fc, d, c)
    best_v = np.maximum(fc, fd)
    while np.any(b - a > REFINE_WIDTH):
        left = fc >= fd
        # shrink toward the better interior point
        a_new = np.where(left, a, c)
        b_new = np.where(left, d, b)
        a, b = a_new, b_new
        c_new = np.where(left, b - _INVPHI * (b - a), d)
        d_new = np.where(left, c, a + _INVPHI * (b - a))
        probe = np.where(left, c_new, d_new)
        fp = ev(probe)
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
        c, d = c_new, d_new
        better = (fp > best_v) | ((fp == best_v) & (probe < best_x))
        best_x = np.where(better, probe, best_x)
        best_v = np.where(better, fp, best_v)
    return best_x, best_v


def _scan(n, beta, stats, eps, omegas: np.ndarray, points: int):
    vals = _objectives(_grid_log_p(n, points, beta, stats, eps), omegas)
    k = np.argmax(vals, axis=0)  # first maximum, i.e. smallest x
    v = vals[k, np.arange(omegas.shape[0])]
    if not np.all(np.isfinite(v)):
        bad = int(np.nonzero(~np.isfinite(v))[0][0])
        raise PrecisionError(f"objective of branch {bad} is not finite anywhere on the scan grid")
    return k, v


def _scan_refine(n, beta, stats, eps, omegas: np.ndarray, points: int):
    k, v_grid = _scan(n, beta, stats, eps, omegas, points)
    step = 1.0 / (points - 1)
    x_grid = k * step
    lo = np.maximum(k - 1, 0) * step
    hi = np.minimum(k + 1, points - 1) * step
    x_r, v_r = _batched_golden(n, beta, stats, eps, omegas, lo, hi)
    use = v_r > v_grid
    return np.where(use, x_r, x_grid), np.where(use, v_r, v_grid)


def _optimize_branches(n, beta, stats, eps, omegas: np.ndarray):
    """Scan, refine, then densify while a denser scan beats the refined optimum."""
    x, v = _scan_refine(n, beta, stats, eps, omegas, SCAN_POINTS)
    active = np.ones(omegas.shape[0], dtype=bool)
    points = SCAN_POINTS
    while points < MAX_SCAN_POINTS and active.any():
        points = 2 * points - 1
        _, v_dense = _scan(n, beta, stats, eps, omegas[active], points)
        gain_rows = np.nonzero(active)[0][v_dense > v[active] + DENSIFY_GAIN]
        active[:] = False
        if gain_rows.size == 0:
            break
        x2, v2 = _scan_refine(n, beta, stats, eps, omegas[gain_rows], points)
        improved = v2 > v[gain_rows]
        x[gain_rows] = np.where(improved, x2, x[gain_rows])
        v[gain_rows] = np.where(improved, v2, v[gain_rows])
        active[gain_rows[improved]] = True
    return x, v


_BRANCH_CACHE: dict = {}
_BRANCH_CACHE_MAX = 200_000


def clear_caches() -> None:
    """Drop every memoised ladder, split state and branch optimum."""
    _BRANCH_CACHE.clear()
    _grid_log_p.cache_clear()
    statmech.clear_caches()


def optimize_positions(cfg: EngineConfig) -> OptimizationResult:
    """Maximise every ``g_j`` independently over the closed interval [0, 1]."""
    w = branch_weights(cfg)
    key_base = (cfg.n, cfg.beta1, cfg.stats, cfg.truncation_eps)
    positions: list[float | None] = []
    pending: dict[tuple, list[int]] = {}
    for j in range(cfg.n + 1):
        col = w[:, j]
        total = math.fsum(col)
        if total <= 0.0:
            # unreachable record: leaving the piston in place costs nothing
            positions.append(cfg.l)
            continue
        omega = tuple(float(v) for v in col / total)
        support = np.nonzero(col > 0.0)[0]
        if support.size == 1 and support[0] in (0, cfg.n):
            # ln P_0 (or ln P_N) reaches its supremum 0 only with the other compartment empty
            positions.append(1.0 if support[0] == 0 else 0.0)
            continue
        hit = _BRANCH_CACHE.get(key_base + (omega,))
        positions.append(hit)
        if hit is None:
            pending.setdefault(omega, []).append(j)
    if pending:
        keys = list(pending)
        try:
            xs, _ = _optimize_branches(*key_base, np.array(keys))
        except PrecisionError as exc:
            raise PrecisionError(f"records {sorted(j for js in pending.values() for j in js)}: {exc}") from exc
        if len(_BRANCH_CACHE) > _BRANCH_CACHE_MAX:
            _BRANCH_CACHE.clear()
        for omega, x in zip(keys, xs):
            _BRANCH_CACHE[key_base + (omega,)] = float(x)
            for j in pending[omega]:
                positions[j] = float(x)
    objectives = [branch_objective(cfg, j, x) for j, x in enumerate(positions)]
    q1 = q1_from_positions(cfg, positions)
    bound = q1_upper_bound(cfg)
    return OptimizationResult(tuple(positions), q1, bound, bound - q1, tuple(objectives))


def _bisect_p0(n_target: float, beta: float, stats: Statistics, eps: float) -> float:
    lo, hi = 0.0, 1.0
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if split_state(1, mid, beta, stats, eps).probabilities[0] < n_target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def single_particle_closed_form(cfg: EngineConfig) -> tuple[float, float]:
    """Optimal ``(l_0, l_1)`` for one particle.

    Each record ``j`` should leave the particle on the left with probability
    ``t_j = w_0j / (w_0j + w_1j)``; ``P_0(x)`` rises monotonically from 0 to 1
    so ``x`` follows by bisection.
    """
    if cfg.n != 1:
        raise DomainError("closed-form optimum exists only for a single particle")
    w = branch_weights(cfg)
    out = []
    for j in range(2):
        tot = w[0, j] + w[1, j]
        if tot <= 0.0:
            out.append(cfg.l)
            continue
        t = w[0, j] / tot
        if t >= 1.0:
            out.append(1.0)
        elif t <= 0.0:
            out.append(0.0)
        else:
            out.append(_bisect_p0(t, cfg.beta1, cfg.stats, cfg.truncation_eps))
    return out[0], out[1]
