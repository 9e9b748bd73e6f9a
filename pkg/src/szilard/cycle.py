"""The five-step engine cycle and its work/heat ledger.

Sign conventions: ``work`` is work done on the system by the operator and
``heat`` is heat absorbed by the system.  Extracted work is ``W = -sum(work)``;
``Q1`` is heat drawn from the hot bath and ``Q2`` heat dumped into the cold one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import OPTIMIZE, EngineConfig
from .demon import JointDistribution, entropy_gain, measurement_work, post_measurement_joint
from .errors import CapabilityError, DomainError, PrecisionError
from .optimize import optimize_positions, q1_from_positions, q1_upper_bound
from .statmech import SplitState, shannon, split_state

__all__ = [
    "EngineConfig",
    "StepEntry",
    "InsertionResult",
    "ExpansionResult",
    "RemovalResult",
    "ErasureResult",
    "CycleReport",
    "STEP_NAMES",
    "insertion_step",
    "expansion_step",
    "removal_step",
    "erasure_step",
    "asymptotic_erasure",
    "run_cycle",
]

STEP_NAMES = (
    "insertion",
    "measurement",
    "expansion",
    "removal_thermalization",
    "removal_isothermal",
    "erasure_adiabatic_1",
    "erasure_isothermal",
    "erasure_adiabatic_2",
)

@dataclass(frozen=True)
class StepEntry:
    name: str
    work: float
    heat: float


def _state(cfg: EngineConfig, x: float) -> SplitState:
    return split_state(cfg.n, x, cfg.beta1, cfg.stats, cfg.truncation_eps)


def _unsplit(cfg: EngineConfig) -> SplitState:
    # a partition at 1 leaves every particle in the full well
    return _state(cfg, 1.0)


# ---------------------------------------------------------------------------
# step 1


@dataclass(frozen=True)
class InsertionResult:
    work: float
    heat: float
    probabilities: np.ndarray
    entropy_residual: float


def insertion_step(cfg: EngineConfig) -> InsertionResult:
    """Quasi-static insertion of the partition at ``l`` in contact with the hot bath."""
    before = _unsplit(cfg)
    after = _state(cfg, cfg.l)
    work = after.free_total - before.free_total
    heat = cfg.t1 * (after.entropy_total - before.entropy_total)
    direct = cfg.beta1 * (after.energy_total - after.free_total)
    resid = after.entropy_total - direct
    return InsertionResult(work, heat, after.probabilities, resid)


# ---------------------------------------------------------------------------
# step 3


@dataclass(frozen=True)
class ExpansionResult:
    work: float
    heat: float
    branch_work: np.ndarray
    branch_heat: np.ndarray
    identity_residual: float


def _check_endpoints(cfg: EngineConfig, joint: np.ndarray, positions) -> None:
    for j, x in enumerate(positions):
        if x not in (0.0, 1.0):
            continue
        st = _state(cfg, x)
        for i in range(cfg.n + 1):
            if joint[i, j] > 0.0 and not st.feasible[i]:
                raise DomainError(
                    f"expansion position l_{j} = {x} empties a compartment that branch i={i} occupies"
                )


def expansion_step(cfg: EngineConfig, joint: JointDistribution, positions) -> ExpansionResult:
    """Demon-controlled isothermal move of the partition to ``positions[j]``."""
    positions = tuple(float(x) for x in positions)
    if len(positions) != cfg.n + 1:
        raise DomainError(f"need {cfg.n + 1} expansion positions, got {len(positions)}")
    if any(not (0.0 <= x <= 1.0) for x in positions):
        raise DomainError("expansion positions must lie in [0, 1]")
    p = joint.p
    _check_endpoints(cfg, p, positions)
    start = _state(cfg, cfg.l)
    m = cfg.n + 1
    bw = np.zeros((m, m))
    bh = np.zeros((m, m))
    s_mea, s_exp = [], []
    for j, x in enumerate(positions):
        end = _state(cfg, x)
        for i in range(m):
            if p[i, j] <= 0.0:
                continue
            bw[i, j] = end.free[i] - start.free[i]
            bh[i, j] = cfg.t1 * (end.entropy[i] - start.entropy[i])
            s_mea.append(p[i, j] * cfg.beta1 * (start.energy[i] - start.free[i]))
            s_exp.append(p[i, j] * cfg.beta1 * (end.energy[i] - end.free[i]))
    mask = p > 0.0
    work = math.fsum((p[mask] * bw[mask]).tolist())
    heat = math.fsum((p[mask] * bh[mask]).tolist())
    # the record/branch mixing entropy is unchanged by the move and cancels
    resid = heat - cfg.t1 * (math.fsum(s_exp) - math.fsum(s_mea))
    return ExpansionResult(work, heat, bw, bh, resid)


# ---------------------------------------------------------------------------
# step 4


@dataclass(frozen=True)
class RemovalResult:
    thermalization_heat: float
    work: float
    heat: float
    post_removal_demon: np.ndarray
    free_energy_after: float


def removal_step(cfg: EngineConfig, joint: JointDistribution, positions) -> RemovalResult:
    """Thermalise each record's branch at fixed walls, then withdraw the partition."""
    p = joint.p
    p1 = joint.demon_marginal
    terms = []
    for j, x in enumerate(positions):
        if p1[j] <= 0.0:
            continue
        st = _state(cfg, x)
        P = st.probabilities
        for i in range(cfg.n + 1):
            c = p1[j] * P[i] - p[i, j]
            if c != 0.0:
                terms.append(c * st.energy[i])
    q_therm = math.fsum(terms)
    full = _unsplit(cfg)
    f_parts, s_parts = [], []
    for j, x in enumerate(positions):
        if p1[j] <= 0.0:
            continue
        st = _state(cfg, x)
        f_parts.append(p1[j] * st.free_total)
        s_parts.append(p1[j] * st.entropy_total)
    work = full.free_total - math.fsum(f_parts)
    heat = cfg.t1 * (full.entropy_total - math.fsum(s_parts))
    return RemovalResult(q_therm, work, heat, p1, full.free_total)


# ---------------------------------------------------------------------------
# step 5


@dataclass(frozen=True)
class ErasureResult:
    gaps_after_measurement: np.ndarray
    gaps_initial: np.ndarray
    work_adiabatic_1: float
    work_isothermal: float
    heat_isothermal: float
    work_adiabatic_2: float
    final_populations: np.ndarray
    energy_identity_residual: float
    flags: tuple[str, ...] = field(default=())


def _gaps(pop: np.ndarray, t2: float) -> np.ndarray:
    """Gaps making ``pop`` a Gibbs state at ``t2``; empty levels sit at +inf.

    Gaps are measured from level 0, or from the most populated level when
    level 0 is empty (a common shift of all levels cancels over the cycle).
    """
    ref = 0 if pop[0] > 0.0 else int(np.argmax(pop))
    safe = np.where(pop > 0.0, pop, 1.0)
    return np.where(pop > 0.0, -t2 * np.log(safe / pop[ref]), np.inf)


def _gibbs_free(gaps: np.ndarray, t2: float) -> float:
    fin = np.isfinite(gaps)
    a = -gaps[fin] / t2
    top = a.max()
    return float(-t2 * (top + math.log(np.exp(a - top).sum())))


def erasure_step(cfg: EngineConfig, p1) -> ErasureResult:
    """Reset the memory to its initial state with the help of the cold bath.

    The levels are first lifted suddenly to gaps making ``p1`` a Gibbs state,
    then morphed isothermally to gaps making ``p0`` a Gibbs state, and finally
    restored suddenly to the original level energies.
    """
    if cfg.t2 <= 0.0:
        raise CapabilityError("erasure through a cold bath needs t2 > 0; use asymptotic_erasure")
    p1 = np.asarray(p1, dtype=float)
    p0 = cfg.demon.p0
    delta = cfg.demon.deltas
    flags = []
    if np.any(p1 <= 0.0) or np.any(p0 <= 0.0):
        flags.append("empty_level_excluded")
    d1 = _gaps(p1, cfg.t2)
    d2 = _gaps(p0, cfg.t2)
    on1 = p1 > 0.0
    on0 = p0 > 0.0
    w1 = math.fsum((p1[on1] * (d1[on1] - delta[on1])).tolist())
    w3 = math.fsum((p0[on0] * (delta[on0] - d2[on0])).tolist())
    q = cfg.t2 * (shannon(p0) - shannon(p1))
    w2 = _gibbs_free(d2, cfg.t2) - _gibbs_free(d1, cfg.t2)
    du = math.fsum((p0[on0] * d2[on0]).tolist()) - math.fsum((p1[on1] * d1[on1]).tolist())
    resid = w2 - (du - q)
    with np.errstate(over="ignore"):
        boltz = np.where(on0, np.exp(-(d2 - 0.0) / cfg.t2), 0.0)
    final = boltz / boltz.sum()
    return ErasureResult(d1, d2, w1, w2, q, w3, final, resid, tuple(flags))


def asymptotic_erasure(cfg: EngineConfig, p1) -> ErasureResult:
    """Zero-temperature reset: collapse all gaps, restore the pure ground record, reopen the gaps.

    Lowering every level to zero returns the measurement energy; with a cold
    bath at zero temperature the isothermal reset then costs no work and
    releases no heat.
    """
    if cfg.t2 != 0.0:
        raise DomainError("asymptotic erasure applies only at t2 = 0")
    if not cfg.demon.is_pure:
        raise DomainError("asymptotic erasure at t2 = 0 needs a pure initial memory state")
    p1 = np.asarray(p1, dtype=float)
    delta = cfg.demon.deltas
    w1 = -math.fsum((p1[1:] * delta[1:]).tolist())
    zeros = np.zeros_like(delta)
    return ErasureResult(zeros, zeros.copy(), w1, 0.0, 0.0, 0.0, cfg.demon.p0, 0.0, ())


# ---------------------------------------------------------------------------
# full cycle


@dataclass(frozen=True)
class CycleReport:
    config: EngineConfig
    ledger: tuple[StepEntry, ...]
    positions: tuple[float, ...]
    probabilities: np.ndarray
    q1: float
    q2: float
    w: float
    eta: float | None
    first_law_residual: float
    q1_closed_form_residual: float
    q2_closed_form_residual: float
    q1_upper_bound: float
    post_removal_demon: np.ndarray
    erasure_gaps: tuple[np.ndarray, np.ndarray]
    expansion_identity_residual: float
    insertion_entropy_residual: float
    erasure_energy_residual: float
    final_demon_populations: np.ndarray
    flags: tuple[str, ...]

    def step(self, name: str) -> StepEntry:
        for e in self.ledger:
            if e.name == name:
                return e
        raise KeyError(name)

    @property
    def w_over_t1(self) -> float:
        return self.w / self.config.t1

    @property
    def q1_steps(self) -> float:
        return math.fsum(e.heat for e in self.ledger if e.name.startswith(("insertion", "expansion", "removal")))

    @property
    def q2_steps(self) -> float:
        return -math.fsum(e.heat for e in self.ledger if e.name.startswith("erasure"))


def _efficiency(cfg: EngineConfig, q1: float, q2: float) -> float | None:
    # Q1/T1 underflowing to a subnormal carries no usable digits
    if q1 > 0.0 and cfg.t2 < cfg.t1 and q1 / cfg.t1 >= 1e-280:
        return 1.0 - q2 / q1
    return None


def _attributed(step: str, fn, *args):
    try:
        return fn(*args)
    except PrecisionError as exc:
        raise PrecisionError(f"{step} step: {exc}") from exc


def run_cycle(cfg: EngineConfig) -> CycleReport:
    """Run insertion, measurement, expansion, removal and erasure; cross-check totals."""
    flags: list[str] = []
    if cfg.expansion == OPTIMIZE:
        positions = _attributed("optimization", optimize_positions, cfg).positions
    else:
        positions = cfg.expansion
    ins = _attributed("insertion", insertion_step, cfg)
    P = ins.probabilities
    joint = post_measurement_joint(cfg.demon, P)
    w_mea = measurement_work(cfg.demon, P)
    exp = _attributed("expansion", expansion_step, cfg, joint, positions)
    rem = _attributed("removal", removal_step, cfg, joint, positions)
    if cfg.t2 > 0.0:
        era = _attributed("erasure", erasure_step, cfg, rem.post_removal_demon)
    else:
        era = asymptotic_erasure(cfg, rem.post_removal_demon)
    flags.extend(era.flags)
    ledger = (
        StepEntry("insertion", ins.work, ins.heat),
        StepEntry("measurement", w_mea, 0.0),
        StepEntry("expansion", exp.work, exp.heat),
        StepEntry("removal_thermalization", 0.0, rem.thermalization_heat),
        StepEntry("removal_isothermal", rem.work, rem.heat),
        StepEntry("erasure_adiabatic_1", era.work_adiabatic_1, 0.0),
        StepEntry("erasure_isothermal", era.work_isothermal, era.heat_isothermal),
        StepEntry("erasure_adiabatic_2", era.work_adiabatic_2, 0.0),
    )
    w = -math.fsum(e.work for e in ledger)
    q1 = q1_from_positions(cfg, positions)
    q2 = cfg.t2 * entropy_gain(cfg.demon, P) if cfg.t2 > 0.0 else 0.0
    q1_steps = math.fsum((ins.heat, exp.heat, rem.thermalization_heat, rem.heat))
    q2_steps = -era.heat_isothermal
    eta = _efficiency(cfg, q1, q2)
    if eta is None:
        flags.append("not_a_heat_engine")
    return CycleReport(
        config=cfg,
        ledger=ledger,
        positions=tuple(float(x) for x in positions),
        probabilities=P,
        q1=q1,
        q2=q2,
        w=w,
        eta=eta,
        first_law_residual=w - (q1 - q2),
        q1_closed_form_residual=q1 - q1_steps,
        q2_closed_form_residual=q2 - q2_steps,
        q1_upper_bound=q1_upper_bound(cfg),
        post_removal_demon=rem.post_removal_demon,
        erasure_gaps=(era.gaps_after_measurement[1:], era.gaps_initial[1:]),
        expansion_identity_residual=exp.identity_residual,
        insertion_entropy_residual=ins.entropy_residual,
        erasure_energy_residual=era.energy_identity_residual,
        final_demon_populations=era.final_populations,
        flags=tuple(flags),
    )
