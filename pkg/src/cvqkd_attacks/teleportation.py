"""Effective channels realized by CV teleportation over a two-mode resource.

Two protocols are covered: the standard measurement-based one (here only via
its closed-form effective channel) and the all-optical variant built from a
two-mode squeezer, the physical channel between the stations, and a beam
splitter. Both turn the teleporter into a phase-insensitive GaussChannel
acting on the teleported mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import GaussChannel
from .gaussian import (
    CovMat,
    TwoModeStd,
    _channel_on_mode,
    _embed_pair,
    _tmsv_entries,
    beam_splitter,
    two_mode_squeezer,
)

# Numeric stand-in for the infinite-amplification limit. sqrt(g) ~ 1e3 keeps
# matrix entries well inside double precision while the gap to the g -> inf
# channel is far below every tolerance used here.
ASYMPTOTIC_GAIN = 1.0e6


@dataclass(frozen=True)
class ResourceState:
    """Two-mode resource in symmetric-sign standard form.

    Blocks diag(a, a), diag(b, b) and cross block diag(c, -c) with a, b >= 1
    and c >= 0. Anything outside this form is rejected, not generalized.
    """

    a: float
    b: float
    c: float

    def __post_init__(self):
        if self.a < 1.0 or self.b < 1.0:
            raise ValueError(f"resource diagonals must be >= 1, got a={self.a}, b={self.b}")
        if self.c < 0.0:
            raise ValueError(f"resource correlation must be >= 0, got c={self.c}")
        self.to_covmat()  # physicality check

    @classmethod
    def from_tmsv(cls, gamma: float) -> "ResourceState":
        if not 0.0 <= gamma < 1.0:
            raise ValueError(f"tmsv squeezing must lie in [0, 1), got {gamma}")
        a, c = _tmsv_entries(gamma)
        return cls(a, a, c)

    def to_covmat(self, labels: tuple[str, str] = ("res1", "res2")) -> CovMat:
        return TwoModeStd(self.a, self.b, self.c, -self.c).to_covmat(labels)


@dataclass(frozen=True)
class TeleportConfig:
    """Gain settings for the all-optical teleporter.

    lam: teleportation gain (the effective transmissivity of the teleported
        channel).
    g: amplifier gain, > 1, or math.inf for the asymptotic protocol
        (resolved to ASYMPTOTIC_GAIN numerically).
    env: the physical channel linking the two stations.

    The splitter transmissivity t = lam / (g tau) must land in [0, 1].
    """

    lam: float
    g: float
    env: GaussChannel

    def __post_init__(self):
        if self.lam < 0.0:
            raise ValueError(f"teleportation gain must be >= 0, got {self.lam}")
        if not (self.g > 1.0 or math.isinf(self.g)):
            raise ValueError(f"amplifier gain must be > 1 or inf, got {self.g}")
        if self.splitter_transmissivity() > 1.0:
            raise ValueError(
                f"lam = {self.lam} exceeds g*tau = {self.gain * self.env.tau}; "
                "splitter transmissivity would leave [0, 1]"
            )

    @property
    def gain(self) -> float:
        """The finite amplifier gain actually used in formulas and pipelines."""
        return ASYMPTOTIC_GAIN if math.isinf(self.g) else self.g

    def splitter_transmissivity(self) -> float:
        return self.lam / (self.gain * self.env.tau)


def bk_effective_channel(res: ResourceState, lam: float) -> GaussChannel:
    """Channel realized by standard CV teleportation at gain lam:
    tau_tel = lam, v_tel = a lam - 2 c sqrt(lam) + b."""
    if lam < 0.0:
        raise ValueError(f"teleportation gain must be >= 0, got {lam}")
    v_tel = res.a * lam - 2.0 * res.c * math.sqrt(lam) + res.b
    try:
        return GaussChannel(lam, v_tel)
    except ValueError as exc:
        raise ValueError(f"resource cannot realize this gain: {exc}") from None


def ao_effective_channel(res: ResourceState, cfg: TeleportConfig) -> GaussChannel:
    """Channel realized by the all-optical teleporter at finite amplification.

    v_tel = a lam - 2 c sqrt(lam (g-1)(g tau - lam) / (tau g^2))
            - lam (a tau + b - v) / (tau g) + b

    where (tau, v) is the physical channel between the stations. Converges to
    the standard-teleportation channel as g grows.
    """
    g = cfg.gain
    tau, v = cfg.env.tau, cfg.env.v
    lam = cfg.lam
    radicand = lam * (g - 1.0) * (g * tau - lam) / (tau * g * g)
    if radicand < 0.0:
        raise ValueError(f"g*tau = {g * tau} below lam = {lam}: radical is imaginary")
    v_tel = (
        res.a * lam
        - 2.0 * res.c * math.sqrt(radicand)
        - lam * (res.a * tau + res.b - v) / (tau * g)
        + res.b
    )
    try:
        return GaussChannel(lam, v_tel)
    except ValueError as exc:
        raise ValueError(f"resource cannot realize this gain: {exc}") from None


def ao_simulate(state: CovMat, res: ResourceState, cfg: TeleportConfig) -> CovMat:
    """Run the all-optical pipeline on a two-mode state, teleporting its
    second mode, and return the surviving two-mode state.

    Steps: adjoin the resource, amplify (signal, resource arm 1) with the
    two-mode squeezer of gain g, send the amplified signal through the
    physical channel, recombine (signal, resource arm 2) on the beam splitter
    of transmissivity t = lam/(g tau), then trace out both resource arms.
    """
    if state.n_modes != 2:
        raise ValueError(f"expected a two-mode input state, got {state.n_modes} modes")
    ref, sig = state.labels
    # Mode slots: ref 0, signal 1, resource arms 2 and 3. The amplified
    # intermediates (entries ~ g * a) stay raw; only the surviving two-mode
    # block becomes a state again.
    joint = np.zeros((8, 8))
    joint[:4, :4] = state.matrix
    joint[4:, 4:] = res.to_covmat().matrix
    amp = _embed_pair(two_mode_squeezer(cfg.gain).matrix, 4, 1, 2)
    joint = amp @ joint @ amp.T
    joint = _channel_on_mode(joint, 1, cfg.env.tau, cfg.env.v)
    mix = _embed_pair(beam_splitter(cfg.splitter_transmissivity()).matrix, 4, 1, 3)
    joint = mix @ joint @ mix.T
    return CovMat(joint[:4, :4], (ref, sig))
