"""Phase-insensitive channel layer: taxonomy, dilation, identification."""

import math

import numpy as np
import pytest

from conftest import random_two_mode_state
from cvqkd_attacks.channels import (
    ChannelKind,
    GaussChannel,
    apply_channel,
    classify,
    dilation,
    effective_channel,
    is_entanglement_breaking,
    loss_channel_state,
)
from cvqkd_attacks.gaussian import CovMat, Symplectic, apply_symplectic, partial_trace


def test_channel_validation():
    with pytest.raises(ValueError, match="transmissivity"):
        GaussChannel(0.0, 0.5)
    with pytest.raises(ValueError, match="nonnegative"):
        GaussChannel(0.5, -0.1)
    with pytest.raises(ValueError, match="unphysical channel"):
        GaussChannel(0.5, 0.4)
    # v may undershoot the floor by up to the slack without being rejected
    GaussChannel(0.5, 0.5 - 5e-10)


@pytest.mark.parametrize(
    "tau,v,kind",
    [
        (1.0, 0.0, ChannelKind.IDENTITY),
        (0.5, 0.5, ChannelKind.PURE_LOSS),
        (0.5, 0.6, ChannelKind.THERMAL_LOSS),
        (1.5, 0.5, ChannelKind.PURE_AMPLIFIER),
        (1.5, 0.7, ChannelKind.THERMAL_AMPLIFIER),
        (1.0, 0.2, ChannelKind.ADDITIVE_NOISE),
    ],
)
def test_classify(tau, v, kind):
    assert classify(GaussChannel(tau, v)) is kind


def test_excess_noise():
    assert math.isclose(GaussChannel(0.25, 0.7575).excess_noise, 1.01, rel_tol=1e-12)
    assert GaussChannel(1.0, 0.2).excess_noise == 0.2


def test_entanglement_breaking_boundary():
    assert is_entanglement_breaking(GaussChannel(0.25, 1.25))
    assert not is_entanglement_breaking(GaussChannel(0.25, 1.2))


@pytest.mark.parametrize("tau,v", [(0.7, 0.3), (0.6, 0.4 * 1.3), (0.25, 0.7575)])
def test_apply_channel_agrees_with_explicit_dilation(rng, tau, v):
    # two independent routes to the same reduced state: the direct moment map
    # and discarding the environment of the beam-splitter model
    ch = GaussChannel(tau, v)
    st = random_two_mode_state(rng, ("keep", "sig"))
    direct = apply_channel(st, ch, "sig")
    dilated = loss_channel_state(st, ch, "sig", ("e1", "e2"))
    reduced = partial_trace(dilated, ("keep", "sig"))
    assert np.abs(direct.matrix - reduced.matrix).max() <= 1e-10


def test_dilation_pure_loss_uses_vacuum():
    env, t, coupled = dilation(GaussChannel(0.5, 0.5))
    assert t == 0.5
    assert coupled == "env1"
    assert np.array_equal(env.matrix, np.eye(4))


def test_dilation_thermal_environment_variance():
    ch = GaussChannel(0.25, 0.75 * 1.2)
    env, t, coupled = dilation(ch, ("a", "b"))
    assert t == 0.25
    assert coupled == "a"
    # the coupled arm of the environment pair carries the channel's
    # input-referred noise as its variance
    assert math.isclose(env.matrix[0, 0], 1.2, rel_tol=1e-12)


def test_dilation_identity():
    env, t, coupled = dilation(GaussChannel(1.0, 0.0))
    assert t == 1.0
    assert np.array_equal(env.matrix, np.eye(4))


def test_dilation_domain():
    with pytest.raises(ValueError, match="tau <= 1"):
        dilation(GaussChannel(1.5, 0.5))
    with pytest.raises(ValueError, match="no beam-splitter dilation"):
        dilation(GaussChannel(1.0, 0.3))


@pytest.mark.parametrize("tau,v", [(0.7, 0.3), (0.25, 0.7575), (0.9, 0.1 * 1.15)])
def test_effective_channel_identifies_loss(tau, v):
    ch = GaussChannel(tau, v)
    found = effective_channel(lambda probe: apply_channel(probe, ch, "probe_sig"))
    assert abs(found.tau - tau) <= 1e-9
    assert abs(found.v - v) <= 1e-9


def test_effective_channel_identity():
    found = effective_channel(lambda probe: probe)
    assert classify(found) is ChannelKind.IDENTITY


def test_effective_channel_rejects_bad_transform():
    with pytest.raises(TypeError, match="CovMat"):
        effective_channel(lambda probe: probe.matrix)

    def squeeze_signal(probe: CovMat) -> CovMat:
        s = Symplectic(np.diag([2.0, 0.5]), 1)
        return apply_symplectic(probe, s, ("probe_sig",))

    with pytest.raises(ValueError, match="phase-insensitive"):
        effective_channel(squeeze_signal)


@pytest.mark.parametrize("gamma_probe", [0.0, 1.0, -0.2])
def test_effective_channel_probe_domain(gamma_probe):
    with pytest.raises(ValueError, match="probe squeezing"):
        effective_channel(lambda probe: probe, gamma_probe=gamma_probe)
