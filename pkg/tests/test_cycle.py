import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from szilard import CapabilityError, DemonSpec, DomainError, EngineConfig, run_cycle, single_particle_closed_form
from szilard.cycle import (
    STEP_NAMES,
    asymptotic_erasure,
    erasure_step,
    expansion_step,
    insertion_step,
    removal_step,
)
from szilard.demon import measurement_work, post_measurement_joint
from szilard.statmech import entropy, SpectrumParams, split_state

from helpers import first_law_scale, random_suite

FOUR_PARTICLE_POPS = (0.7, 0.21, 0.063, 0.0189, 0.0081)


def _cfg(n=2, stats="bose", t1=3.0, t2=1.0, l=0.4, pops=None, expansion="optimize"):
    demon = DemonSpec.linear(pops) if pops else DemonSpec.linear((0.8,) + (0.2 / n,) * n)
    return EngineConfig(n, stats, t1, t2, l, demon, expansion)


# ---------------------------------------------------------------- insertion

@pytest.mark.parametrize("n,stats,l", [(1, "bose", 0.5), (2, "bose", 0.3), (3, "fermi", 0.6), (4, "fermi", 0.5),
                                       (4, "bose", 0.2)])
def test_insertion_work_positive_and_growing(n, stats, l):
    works = [insertion_step(_cfg(n, stats, t1, 0.5, l)).work for t1 in (1.0, 10.0, 100.0, 1000.0)]
    assert all(w > 0.0 for w in works)
    assert all(b > a for a, b in zip(works, works[1:]))


def test_insertion_work_off_centre_fermions():
    """Squeezing fermions into a small box costs ground-state energy, so the work first dips with T."""
    works = [insertion_step(_cfg(4, "fermi", t1, 0.5, 0.2)).work for t1 in (1.0, 10.0, 100.0, 1000.0, 1e4)]
    assert all(w > 0.0 for w in works)
    assert works[1] < works[0]
    assert works[1] < works[2] < works[3] < works[4]


def test_insertion_heat_matches_direct_entropy():
    cfg = _cfg(1, "bose", 4.0, 1.0, 0.5)
    res = insertion_step(cfg)
    beta = cfg.beta1
    # one particle: entropy after insertion is the branch mixing entropy plus each side's entropy
    s_left = entropy(1, SpectrumParams.of(0.5, beta), "bose")
    s_after = math.log(2.0) + s_left
    s_before = entropy(1, SpectrumParams.of(1.0, beta), "bose")
    assert res.heat == pytest.approx(cfg.t1 * (s_after - s_before), rel=1e-12, abs=1e-12)
    assert abs(res.entropy_residual) < 1e-12


# ---------------------------------------------------------------- expansion

@pytest.mark.parametrize("stats", ["bose", "fermi"])
def test_no_movement_no_exchange(stats):
    cfg = _cfg(3, stats, 2.0, 1.0, 0.35)
    P = insertion_step(cfg).probabilities
    res = expansion_step(cfg, post_measurement_joint(cfg.demon, P), (cfg.l,) * 4)
    assert res.work == 0.0 and res.heat == 0.0


@pytest.mark.parametrize("cfg", random_suite(40, seed=7), ids=lambda c: f"n{c.n}-{c.stats.value}-t{c.t1:.3g}")
def test_expansion_heat_is_t_delta_s(cfg):
    rep = run_cycle(cfg)
    assert abs(rep.expansion_identity_residual) <= 1e-9 * max(1.0, abs(rep.q1))


def test_classical_szilard_limit():
    """Full expansion of a single particle approaches T ln 2 of extracted work as T grows."""
    prev = None
    for t1 in (10.0, 100.0, 1e3, 1e4, 1e5):
        cfg = EngineConfig(1, "bose", t1, 0.0, 0.5, DemonSpec.error_free(1), (1.0, 0.0))
        extracted = -run_cycle(cfg).step("expansion").work / t1
        gap = extracted - math.log(2.0)
        assert gap > 0.0
        if prev is not None:
            assert gap < prev
        prev = gap
    assert prev < 5e-3


def test_endpoint_incompatible_with_branch():
    cfg = _cfg(2, "bose", 2.0, 1.0, 0.4, expansion=(1.0, 0.4, 0.4))
    with pytest.raises(DomainError, match="l_0"):
        run_cycle(cfg)


def test_expansion_rejects_wrong_length():
    cfg = _cfg(2, "bose", 2.0, 1.0, 0.4)
    joint = post_measurement_joint(cfg.demon, insertion_step(cfg).probabilities)
    with pytest.raises(DomainError):
        expansion_step(cfg, joint, (0.5, 0.5))


def test_endpoint_ok_for_single_reachable_branch():
    cfg = EngineConfig(1, "fermi", 2.0, 0.0, 0.5, DemonSpec.error_free(1), (1.0, 0.0))
    rep = run_cycle(cfg)
    assert rep.w == pytest.approx(2.0 * math.log(2.0), rel=1e-12)


# ---------------------------------------------------------------- removal

@pytest.mark.parametrize("l,t1,p1", [(0.2, 2.0, 0.1), (0.5, 5.0, 0.3), (0.7, 20.0, 0.0)])
def test_single_particle_needs_no_thermalization(l, t1, p1):
    cfg = EngineConfig(1, "bose", t1, 1.0, l, DemonSpec.linear((1.0 - p1, p1)))
    exact = cfg.with_positions(single_particle_closed_form(cfg))
    assert abs(run_cycle(exact).step("removal_thermalization").heat) < 1e-10 * t1
    # a flat optimum pins the searched position only to about sqrt(machine eps)
    assert abs(run_cycle(cfg).step("removal_thermalization").heat) < 1e-7 * t1


@pytest.mark.parametrize("stats", ["bose", "fermi"])
def test_removal_keeps_demon_marginal_and_restores_substance(stats):
    cfg = _cfg(3, stats, 2.5, 1.0, 0.45)
    P = insertion_step(cfg).probabilities
    joint = post_measurement_joint(cfg.demon, P)
    rep = run_cycle(cfg)
    rem = removal_step(cfg, joint, rep.positions)
    assert np.array_equal(rem.post_removal_demon, joint.demon_marginal)
    f_s0 = split_state(cfg.n, 1.0, cfg.beta1, cfg.stats).free_total
    assert rem.free_energy_after == pytest.approx(f_s0, abs=1e-10)


# ---------------------------------------------------------------- erasure

def _erasure_cfg(t2=1.0, pops=(0.7, 0.2, 0.1)):
    return EngineConfig(2, "fermi", 2.0, t2, 0.5, DemonSpec.linear(pops))


def test_three_level_erasure_gaps():
    res = erasure_step(_erasure_cfg(), np.array([0.3, 0.5, 0.2]))
    assert res.gaps_after_measurement[1:] == pytest.approx([-0.5108, 0.4055], abs=5e-5)
    assert res.gaps_initial[1:] == pytest.approx([1.2528, 1.9459], abs=5e-5)


def test_nothing_to_erase():
    p0 = np.array([0.7, 0.2, 0.1])
    res = erasure_step(_erasure_cfg(), p0)
    assert np.array_equal(res.gaps_after_measurement, res.gaps_initial)
    assert res.heat_isothermal == 0.0
    total = res.work_adiabatic_1 + res.work_isothermal + res.work_adiabatic_2
    assert abs(total) < 1e-15


@pytest.mark.parametrize("p1", [(0.3, 0.5, 0.2), (0.1, 0.8, 0.1), (0.34, 0.33, 0.33)])
def test_erasure_telescopes(p1):
    cfg = _erasure_cfg()
    res = erasure_step(cfg, np.array(p1))
    total = res.work_adiabatic_1 + res.work_isothermal + res.work_adiabatic_2
    w_mea = math.fsum((np.array(p1) - cfg.demon.p0) * cfg.demon.deltas)
    assert total == pytest.approx(-res.heat_isothermal - w_mea, abs=1e-13)
    assert res.final_populations == pytest.approx(cfg.demon.p0, abs=1e-12)
    assert abs(res.energy_identity_residual) < 1e-13


def test_erasure_flags_empty_level():
    res = erasure_step(_erasure_cfg(), np.array([0.6, 0.4, 0.0]))
    assert "empty_level_excluded" in res.flags
    assert res.gaps_after_measurement[2] == math.inf


def test_erasure_needs_warm_sink():
    cfg = EngineConfig(2, "fermi", 2.0, 0.0, 0.5, DemonSpec.error_free(2))
    with pytest.raises(CapabilityError):
        erasure_step(cfg, np.array([0.3, 0.5, 0.2]))


def test_asymptotic_erasure_rejects_warm_sink_and_impure_demon():
    with pytest.raises(DomainError):
        asymptotic_erasure(_erasure_cfg(), np.array([0.3, 0.5, 0.2]))
    with pytest.raises(DomainError):
        asymptotic_erasure(EngineConfig(2, "fermi", 2.0, 0.0, 0.5, DemonSpec.linear((0.7, 0.2, 0.1))),
                           np.array([0.3, 0.5, 0.2]))


# ---------------------------------------------------------------- whole cycle

SUITE = random_suite(60, seed=11)


@pytest.mark.parametrize("cfg", SUITE, ids=lambda c: f"n{c.n}-{c.stats.value}-t{c.t1:.3g}-t2{c.t2:.3g}")
def test_cycle_invariants(cfg):
    rep = run_cycle(cfg)
    assert [e.name for e in rep.ledger] == list(STEP_NAMES)
    assert rep.step("measurement").heat == 0.0
    assert rep.step("erasure_adiabatic_1").heat == 0.0
    assert rep.step("erasure_adiabatic_2").heat == 0.0
    assert rep.step("removal_thermalization").work == 0.0
    assert abs(rep.first_law_residual) <= first_law_scale(rep)
    assert abs(rep.q1_closed_form_residual) <= 1e-8 * max(1.0, abs(rep.q1))
    assert abs(rep.q2_closed_form_residual) <= 1e-8 * max(1.0, abs(rep.q1))
    assert rep.q2 >= -1e-12
    if rep.eta is not None:
        assert rep.eta <= 1.0 - cfg.t2 / cfg.t1 + 1e-9
    assert rep.final_demon_populations == pytest.approx(cfg.demon.p0, abs=1e-12)


@given(st.integers(1, 4), st.sampled_from(["bose", "fermi"]), st.floats(0.05, 0.95), st.floats(0.3, 30.0))
@settings(max_examples=25, deadline=None)
def test_zero_temperature_sink_gives_w_equal_q1(n, stats, l, t1):
    rep = run_cycle(EngineConfig(n, stats, t1, 0.0, l, DemonSpec.error_free(n)))
    assert rep.q2 == 0.0
    assert rep.w == pytest.approx(rep.q1, abs=1e-9 * max(1.0, rep.q1))


def test_single_particle_half_split_extracts_t_ln2():
    for t1 in (0.5, 3.0, 40.0):
        rep = run_cycle(EngineConfig(1, "bose", t1, 0.0, 0.5, DemonSpec.error_free(1)))
        assert rep.w == pytest.approx(t1 * math.log(2.0), rel=1e-10)


def test_deterministic_split_extracts_nothing():
    # at low temperature a far off-centre partition leaves every particle on the left
    rep = run_cycle(EngineConfig(2, "fermi", 0.01, 0.0, 0.9, DemonSpec.error_free(2)))
    assert rep.probabilities[0] == 1.0
    assert rep.w == 0.0


def test_totals_independent_of_level_spacing():
    reps = [run_cycle(EngineConfig(3, "bose", 2.0, 0.7, 0.4,
                                   DemonSpec.linear((0.7, 0.15, 0.1, 0.05), spacing))) for spacing in (0.0, 1.0, 7.5)]
    for rep in reps[1:]:
        assert rep.q1 == reps[0].q1
        assert rep.q2 == reps[0].q2
        assert rep.w == pytest.approx(reps[0].w, abs=1e-12)


def test_not_a_heat_engine_when_sink_is_hotter():
    rep = run_cycle(_cfg(2, "bose", 1.0, 1.5, 0.4))
    assert rep.eta is None
    assert "not_a_heat_engine" in rep.flags


@pytest.mark.parametrize("stats,w,q1,q2", [
    ("bose", 0.014660307985806836, 0.2939397288390953, 0.27927942085328883),
    ("fermi", 0.3210843544737457, 0.6421687783139558, 0.32108442384021146),
])
def test_four_particle_regression(stats, w, q1, q2):
    """Frozen output for N=4, T1=2, T2=1, l=0.4; the ledger and the closed forms agree on it."""
    rep = run_cycle(EngineConfig(4, stats, 2.0, 1.0, 0.4, DemonSpec.linear(FOUR_PARTICLE_POPS)))
    assert rep.w == pytest.approx(w, rel=1e-9)
    assert rep.q1 == pytest.approx(q1, rel=1e-9)
    assert rep.q2 == pytest.approx(q2, rel=1e-9)
    assert abs(rep.first_law_residual) < 1e-12
