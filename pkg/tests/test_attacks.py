"""Attack evaluation: resource thresholds, cloner, teleportation optimizer."""

import math

import pytest

from cvqkd_attacks.attacks import (
    AttackResult,
    AttackScenario,
    _ao_v_eff,
    _feasible_eta_window,
    _match_kappa,
    ao_attack_state,
    cloner_attack,
    entanglement_lower_bound,
    entropy_of_entanglement,
    eve_info,
    gamma_min,
    holevo_bound,
    optimize_attack,
    simulation_residual,
)
from cvqkd_attacks.channels import GaussChannel
from cvqkd_attacks.gaussian import partial_trace, tmsv, von_neumann_entropy
from cvqkd_attacks.teleportation import ASYMPTOTIC_GAIN

THERMAL = GaussChannel(0.25, 0.7575)
PURE = GaussChannel(0.25, 0.75)


def scenario(ch=THERMAL, **kw):
    return AttackScenario(ch, zeta=0.7, **kw)


def test_scenario_validation():
    with pytest.raises(ValueError, match="source squeezing"):
        AttackScenario(THERMAL, zeta=1.0)
    with pytest.raises(ValueError, match="unsupported detection"):
        AttackScenario(THERMAL, zeta=0.7, detection="homodyne")
    with pytest.raises(ValueError, match="reconciliation"):
        AttackScenario(THERMAL, zeta=0.7, reconciliation="sideways")
    with pytest.raises(ValueError, match="gain"):
        AttackScenario(THERMAL, zeta=0.7, gain=0.5)
    with pytest.raises(ValueError, match="entanglement-breaking"):
        AttackScenario(GaussChannel(0.25, 1.3), zeta=0.7)


def test_scenario_resolution():
    sc = scenario()
    assert sc.resolved_gain == ASYMPTOTIC_GAIN
    assert scenario(gain=500.0).resolved_gain == 500.0
    assert sc.conditioned_label == "B"
    assert scenario(reconciliation="direct").conditioned_label == "A"


def test_attack_result_guards_information_range():
    with pytest.raises(ValueError, match="outside"):
        AttackResult(0.5, 1.0, 0.5, 0.0, 2.0, 1.0, 0.0, True)


def _bk_noise(gamma: float, tau: float) -> float:
    a = (1.0 + gamma * gamma) / (1.0 - gamma * gamma)
    c = 2.0 * gamma / (1.0 - gamma * gamma)
    return a * tau - 2.0 * c * math.sqrt(tau) + a


@pytest.mark.parametrize("tau,v", [(0.25, 0.7575), (0.5, 0.55), (0.8, 0.25)])
def test_gamma_min_against_bisection_oracle(tau, v):
    # independent oracle: the teleported noise a*tau - 2c*sqrt(tau) + a falls
    # from 1+tau at gamma=0 to its minimum 1-tau at gamma=sqrt(tau); bisect
    # the crossing with v on that branch
    lo, hi = 0.0, math.sqrt(tau)
    assert _bk_noise(lo, tau) > v > _bk_noise(hi, tau) - 1e-15
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _bk_noise(mid, tau) > v:
            lo = mid
        else:
            hi = mid
    assert abs(gamma_min(GaussChannel(tau, v)) - 0.5 * (lo + hi)) <= 1e-10


@pytest.mark.parametrize("tau", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_gamma_min_pure_loss_closed_form(tau):
    assert abs(gamma_min(GaussChannel(tau, 1.0 - tau)) - math.sqrt(tau)) <= 1e-12


def test_gamma_min_degenerate_channels():
    assert gamma_min(GaussChannel(0.25, 1.25)) == 0.0
    assert gamma_min(GaussChannel(0.25, 2.0)) == 0.0
    assert gamma_min(GaussChannel(1.0, 0.0)) == 1.0


def test_entanglement_entropy_anchor():
    assert abs(entropy_of_entanglement(0.5) - 1.081704) <= 1e-5


@pytest.mark.parametrize("gamma", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_entanglement_entropy_matches_reduced_state(gamma):
    # the closed form must agree with tracing one arm and taking the entropy
    reduced = partial_trace(tmsv(gamma, ("A", "B")), ("A",))
    assert abs(entropy_of_entanglement(gamma) - von_neumann_entropy(reduced)) <= 1e-10


def test_entanglement_entropy_edges():
    assert entropy_of_entanglement(0.0) == 0.0
    assert entropy_of_entanglement(1.0) == math.inf
    assert entropy_of_entanglement(1.5) == math.inf
    with pytest.raises(ValueError, match=">= 0"):
        entropy_of_entanglement(-0.1)


def test_entanglement_lower_bound_composes():
    ch = GaussChannel(0.5, 0.55)
    assert entanglement_lower_bound(ch) == entropy_of_entanglement(gamma_min(ch))


def test_eve_info_needs_alice_and_bob():
    sc = scenario()
    with pytest.raises(ValueError, match="labels A, B"):
        eve_info(tmsv(0.5, ("A", "B")), sc)
    with pytest.raises(ValueError, match="labels A, B"):
        eve_info(tmsv(0.5, ("E1", "E2")), sc)


def test_cloner_on_identity_channel_learns_nothing():
    res = cloner_attack(scenario(GaussChannel(1.0, 0.0)))
    assert res.gamma == 0.0
    assert abs(res.eve_info_bits) <= 1e-9
    assert abs(res.holevo_bits) <= 1e-9


def test_cloner_thermal_loss():
    res = cloner_attack(scenario())
    # Eve's pair variance reproduces the excess noise: gamma solves
    # (1+g^2)/(1-g^2) = eps, i.e. gamma = sqrt((eps-1)/(eps+1))
    assert math.isclose(res.gamma, math.sqrt(0.01 / 2.01), rel_tol=1e-9)
    assert abs(res.eve_info_bits - res.holevo_bits) <= 1e-9
    assert res.residual <= 1e-12
    assert math.isnan(res.eta_star) and math.isnan(res.kappa_star)
    assert res.feasible


def test_cloner_rejects_amplifiers():
    with pytest.raises(ValueError, match="loss channels"):
        cloner_attack(scenario(GaussChannel(1.5, 0.6)))


def test_attack_state_mode_inventory():
    sc = scenario()
    st = ao_attack_state(sc, 0.6, 0.5, 0.05, 1.0e3)
    assert st.labels == ("A", "B", "R1", "R2", "F1", "F2")
    st_pl = ao_attack_state(scenario(PURE), 0.6, 0.5, 0.0, 1.0e3)
    assert st_pl.labels == ("A", "B", "R1", "R2", "F1")


def test_attack_state_domain():
    sc = scenario()
    with pytest.raises(ValueError, match="resource squeezing"):
        ao_attack_state(sc, 1.0, 0.5, 0.0, 1e3)
    with pytest.raises(ValueError, match="mixing transmissivity"):
        ao_attack_state(sc, 0.6, 1.2, 0.0, 1e3)
    with pytest.raises(ValueError, match="auxiliary squeezing"):
        ao_attack_state(sc, 0.6, 0.5, -0.1, 1e3)
    with pytest.raises(ValueError, match="finite"):
        ao_attack_state(sc, 0.6, 0.5, 0.0, math.inf)
    with pytest.raises(ValueError, match="pins the auxiliary"):
        ao_attack_state(scenario(PURE), 0.6, 0.5, 0.3, 1e3)


def test_feasible_window_brackets_the_matchable_etas():
    tau, v = THERMAL.tau, THERMAL.v
    window = _feasible_eta_window(0.6, tau, v, 0.0)
    assert window is not None
    lo, hi = window
    assert 0.0 <= lo < hi <= 1.0
    g = 1.0e3
    mid = 0.5 * (lo + hi)
    kappa = _match_kappa(0.6, mid, tau, v, g)
    assert kappa is not None and 0.0 <= kappa < 1.0
    assert abs(_ao_v_eff(0.6, mid, kappa, tau, v, g) - v) <= 1e-10
    # outside the window the vacuum auxiliary already overshoots the noise
    if lo > 0.01:
        assert _match_kappa(0.6, lo - 0.01, tau, v, g) is None
    if hi < 0.99:
        assert _match_kappa(0.6, hi + 0.01, tau, v, g) is None


def test_feasible_window_empty_below_threshold():
    assert _feasible_eta_window(0.3, THERMAL.tau, THERMAL.v, 0.0) is None


def test_optimize_below_threshold_is_infeasible():
    res = optimize_attack(scenario(), 0.3)
    assert not res.feasible
    assert math.isnan(res.eta_star)
    assert math.isnan(res.kappa_star)
    assert math.isnan(res.eve_info_bits)
    assert math.isnan(res.residual)
    assert math.isfinite(res.holevo_bits)
    assert math.isfinite(res.ent_resource)


def test_optimize_rejects_bad_gamma():
    with pytest.raises(ValueError, match="resource squeezing"):
        optimize_attack(scenario(), 1.0)


def test_optimize_pure_loss_closed_form():
    sc = scenario(PURE)
    res = optimize_attack(sc, 0.6)
    assert math.isclose(res.eta_star, 0.25 / 0.36, rel_tol=1e-12)
    assert res.kappa_star == 0.0
    assert res.residual <= 1e-12
    assert res.feasible
    assert 0.0 < res.eve_info_bits < res.holevo_bits
    # at the threshold the whole resource is spent: eta = 1
    at_min = optimize_attack(sc, gamma_min(PURE))
    assert at_min.eta_star == 1.0


def test_optimize_thermal_smoke():
    sc = scenario()
    res = optimize_attack(sc, 0.6)
    assert res.feasible
    assert 0.0 < res.eve_info_bits < res.holevo_bits
    assert 0.0 <= res.kappa_star < 1.0
    assert res.residual <= 1e-8
    window = _feasible_eta_window(0.6, THERMAL.tau, THERMAL.v, 0.0)
    assert window[0] <= res.eta_star <= window[1]
    # the reported operating point really presents the target channel
    direct = simulation_residual(sc, 0.6, res.eta_star, res.kappa_star, sc.resolved_gain)
    assert direct == res.residual
