"""Single-mode phase-insensitive Gaussian channels.

A channel is the pair (tau, v): the diagonal block of an affected mode maps
to tau * block + v * I2 and its correlations with every other mode scale by
sqrt(tau).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .gaussian import (
    CovMat,
    apply_symplectic,
    beam_splitter,
    direct_sum,
    partial_trace,
    tmsv,
)

KIND_TOL = 1e-12
_PHYS_SLACK = 1e-9


class ChannelKind(enum.Enum):
    IDENTITY = "identity"
    PURE_LOSS = "pure_loss"
    THERMAL_LOSS = "thermal_loss"
    PURE_AMPLIFIER = "pure_amplifier"
    THERMAL_AMPLIFIER = "thermal_amplifier"
    ADDITIVE_NOISE = "additive_noise"


@dataclass(frozen=True)
class GaussChannel:
    """Phase-insensitive channel with transmissivity tau > 0 and added noise v >= 0.

    Physicality requires v >= |1 - tau|; construction rejects anything below
    that floor by more than a small slack.
    """

    tau: float
    v: float

    def __post_init__(self):
        if self.tau <= 0.0:
            raise ValueError(f"transmissivity must be positive, got {self.tau}")
        if self.v < 0.0:
            raise ValueError(f"added noise must be nonnegative, got {self.v}")
        floor = abs(1.0 - self.tau)
        if self.v < floor - _PHYS_SLACK:
            raise ValueError(
                f"unphysical channel: v = {self.v} below the floor |1 - tau| = {floor}"
            )

    @property
    def excess_noise(self) -> float:
        """Noise referred to the channel input, v / (1 - tau) style; see classify."""
        if abs(self.tau - 1.0) <= KIND_TOL:
            return self.v
        return self.v / abs(1.0 - self.tau)


def classify(channel: GaussChannel) -> ChannelKind:
    """Place the channel in the phase-insensitive taxonomy.

    tau = 1: identity when v = 0, additive noise otherwise. tau < 1: pure loss
    when v sits on the floor 1 - tau, thermal loss above it. tau > 1: pure
    amplifier on the floor tau - 1, thermal amplifier above it. Comparisons
    use an absolute tolerance of 1e-12.
    """
    tau, v = channel.tau, channel.v
    if abs(tau - 1.0) <= KIND_TOL:
        return ChannelKind.IDENTITY if abs(v) <= KIND_TOL else ChannelKind.ADDITIVE_NOISE
    floor = abs(1.0 - tau)
    on_floor = abs(v - floor) <= KIND_TOL
    if tau < 1.0:
        return ChannelKind.PURE_LOSS if on_floor else ChannelKind.THERMAL_LOSS
    return ChannelKind.PURE_AMPLIFIER if on_floor else ChannelKind.THERMAL_AMPLIFIER


def is_entanglement_breaking(channel: GaussChannel) -> bool:
    """True when v >= 1 + tau, the point where the channel output stays
    separable from anything the input was entangled with."""
    return channel.v >= 1.0 + channel.tau - KIND_TOL


def apply_channel(state: CovMat, channel: GaussChannel, target_label: str) -> CovMat:
    """Act with the channel on one mode of a multimode state."""
    i = state.index(target_label)
    n = state.n_modes
    scale = np.ones(2 * n)
    scale[2 * i : 2 * i + 2] = math.sqrt(channel.tau)
    out = state.matrix * np.outer(scale, scale)
    out[2 * i, 2 * i] += channel.v
    out[2 * i + 1, 2 * i + 1] += channel.v
    return CovMat(out, state.labels)


def dilation(channel: GaussChannel, env_labels: tuple[str, str] = ("env1", "env2")):
    """Stinespring-style model of a lossy channel: a beam splitter of
    transmissivity tau coupling the signal to one arm of an environment TMSV.

    Returns (environment CovMat, beam splitter transmissivity, label of the
    coupled environment mode). The environment squeezing solves
    (1 + gamma^2)/(1 - gamma^2) = v/(1 - tau); pure loss uses vacuum. Only
    loss channels (tau < 1) and the identity admit this model here.
    """
    tau, v = channel.tau, channel.v
    if tau > 1.0 + KIND_TOL:
        raise ValueError("beam-splitter dilation covers tau <= 1 only")
    if abs(tau - 1.0) <= KIND_TOL:
        if abs(v) > KIND_TOL:
            raise ValueError("additive-noise channel has no beam-splitter dilation")
        env = tmsv(0.0, env_labels)
        return env, 1.0, env_labels[0]
    eps = v / (1.0 - tau)
    if eps < 1.0 - _PHYS_SLACK:
        raise ValueError(f"environment variance {eps} below vacuum")
    eps = max(eps, 1.0)
    gamma_env = math.sqrt((eps - 1.0) / (eps + 1.0))
    return tmsv(gamma_env, env_labels), tau, env_labels[0]


def effective_channel(
    transform, gamma_probe: float = 0.5, atol: float = 1e-8
) -> GaussChannel:
    """Identify the (tau, v) pair a black-box state transformation implements.

    transform receives a TMSV probe CovMat labeled ("probe_ref", "probe_sig"),
    acts on the signal arm however it likes, and returns a state still
    containing both probe labels. The output must retain the standard
    phase-insensitive form (x and p entries matching up to sign within atol).
    """
    if not 0.0 < gamma_probe < 1.0:
        raise ValueError(f"probe squeezing must lie in (0, 1), got {gamma_probe}")
    probe = tmsv(gamma_probe, ("probe_ref", "probe_sig"))
    a_in = probe.matrix[0, 0]
    c_in = probe.matrix[0, 2]
    out = transform(probe)
    if not isinstance(out, CovMat):
        raise TypeError("transform must return a CovMat")
    reduced = partial_trace(out, ("probe_ref", "probe_sig"))
    m = reduced.matrix
    ref_block = reduced.block("probe_ref", "probe_ref")
    sig_block = reduced.block("probe_sig", "probe_sig")
    cross = reduced.block("probe_ref", "probe_sig")
    sym_dev = max(
        abs(ref_block[0, 0] - ref_block[1, 1]),
        abs(sig_block[0, 0] - sig_block[1, 1]),
        abs(cross[0, 0] + cross[1, 1]),
        abs(ref_block[0, 1]),
        abs(sig_block[0, 1]),
        abs(cross[0, 1]),
        abs(cross[1, 0]),
        abs(float(m[0, 0]) - a_in),
    )
    if sym_dev > atol:
        raise ValueError(
            f"transform is not phase-insensitive on the probe (deviation {sym_dev:.3g})"
        )
    c_out = float(cross[0, 0])
    b_out = float(sig_block[0, 0])
    tau = (c_out / c_in) ** 2
    v = b_out - tau * a_in
    return GaussChannel(tau, max(v, 0.0))


def loss_channel_state(
    state: CovMat, channel: GaussChannel, target_label: str, env_labels: tuple[str, str]
) -> CovMat:
    """Apply a loss channel by explicit dilation, keeping the environment modes."""
    env, t, coupled = dilation(channel, env_labels)
    joint = direct_sum(state, env)
    return apply_symplectic(joint, beam_splitter(t), (target_label, coupled))
