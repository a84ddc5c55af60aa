"""Collective eavesdropping attacks on a Gaussian-modulated CV-QKD link.

Two attacks share the scenario: the entangling cloner, which replaces the
thermal-loss channel by a beam splitter coupled to one arm of Eve's
entangled state, and the all-optical teleportation attack, which re-creates
the channel from a finite entangled resource plus an amplifier and two beam
splitters. Eve's extractable information, the Holevo bound, and the
entanglement cost bounds live here too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import (
    ChannelKind,
    GaussChannel,
    apply_channel,
    classify,
    effective_channel,
    is_entanglement_breaking,
)
from .gaussian import (
    _HP_SCALE,
    CovMat,
    _channel_on_mode,
    _embed_pair,
    _entropy_term,
    _schur_heterodyne_hp,
    _symplectic_spectrum,
    apply_symplectic,
    beam_splitter,
    condition_heterodyne,
    direct_sum,
    partial_trace,
    symplectic_form,
    thermal,
    tmsv,
    two_mode_squeezer,
    von_neumann_entropy,
)
from .teleportation import ASYMPTOTIC_GAIN

_ROOT_TOL = 1e-12
_FEASIBLE_RESIDUAL = 1e-8


@dataclass(frozen=True)
class AttackScenario:
    """Protocol settings shared by both attacks.

    channel: the physical Alice-to-Bob channel (loss channels in scope).
    zeta: squeezing of Alice's source tmsv.
    detection: only "heterodyne" is supported (both parties).
    reconciliation: "reverse" conditions on Bob, "direct" on Alice.
    gain: amplifier gain for the teleportation attack; math.inf selects the
        asymptotic protocol, realized numerically at ASYMPTOTIC_GAIN.
    """

    channel: GaussChannel
    zeta: float
    detection: str = "heterodyne"
    reconciliation: str = "reverse"
    gain: float = math.inf

    def __post_init__(self):
        if not 0.0 <= self.zeta < 1.0:
            raise ValueError(f"source squeezing must lie in [0, 1), got {self.zeta}")
        if self.detection != "heterodyne":
            raise ValueError(f"unsupported detection {self.detection!r}")
        if self.reconciliation not in ("direct", "reverse"):
            raise ValueError(f"reconciliation must be 'direct' or 'reverse', got {self.reconciliation!r}")
        if not (self.gain > 1.0 or math.isinf(self.gain)):
            raise ValueError(f"gain must be > 1 or inf, got {self.gain}")
        if is_entanglement_breaking(self.channel):
            raise ValueError("entanglement-breaking channel: no collective attack to analyze")

    @property
    def resolved_gain(self) -> float:
        return ASYMPTOTIC_GAIN if math.isinf(self.gain) else self.gain

    @property
    def conditioned_label(self) -> str:
        return "B" if self.reconciliation == "reverse" else "A"


@dataclass(frozen=True)
class AttackResult:
    """Outcome of one attack evaluation.

    Infeasible results carry NaN in eta_star, kappa_star, eve_info_bits and
    residual; ent_resource and holevo_bits stay meaningful.
    """

    gamma: float
    ent_resource: float
    eta_star: float
    kappa_star: float
    eve_info_bits: float
    holevo_bits: float
    residual: float
    feasible: bool

    def __post_init__(self):
        if self.feasible:
            if not -1e-9 <= self.eve_info_bits <= self.holevo_bits + 1e-6:
                raise ValueError(
                    f"Eve's information {self.eve_info_bits} outside [0, Holevo bound "
                    f"{self.holevo_bits}]"
                )


def gamma_min(ch: GaussChannel) -> float:
    """Smallest resource squeezing that can still simulate the channel.

    gamma_min = (2 sqrt(tau) - sqrt((v+1-tau)(v-1+tau))) / (tau + v + 1).
    Entanglement-breaking channels give 0 (no entanglement is of any use);
    the identity gives 1 (maximal entanglement, unattainable).
    """
    tau, v = ch.tau, ch.v
    # v - (1 - tau), not v - 1 + tau: the grouped form vanishes exactly for
    # pure loss, where the ungrouped one leaves an O(eps) remainder that the
    # square root inflates to ~1e-8
    radicand = max((v + 1.0 - tau) * (v - (1.0 - tau)), 0.0)
    value = (2.0 * math.sqrt(tau) - math.sqrt(radicand)) / (tau + v + 1.0)
    return max(value, 0.0)


def entropy_of_entanglement(gamma: float) -> float:
    """Entanglement of a tmsv(gamma) in ebits.

    [2 gamma^2 ln gamma + (1 - gamma^2) ln(1 - gamma^2)] / ((gamma^2 - 1) ln 2),
    identical to the von Neumann entropy of the reduced single-mode state.
    Returns math.inf for gamma >= 1.
    """
    if gamma < 0.0:
        raise ValueError(f"squeezing must be >= 0, got {gamma}")
    if gamma >= 1.0:
        return math.inf
    if gamma == 0.0:
        return 0.0
    g2 = gamma * gamma
    return (2.0 * g2 * math.log(gamma) + (1.0 - g2) * math.log1p(-g2)) / (
        (g2 - 1.0) * math.log(2.0)
    )


def entanglement_lower_bound(ch: GaussChannel) -> float:
    """Fewest ebits any resource simulating the channel can carry."""
    return entropy_of_entanglement(gamma_min(ch))


def _entropy_of(state: CovMat, labels: tuple[str, ...]) -> float:
    return von_neumann_entropy(partial_trace(state, labels))


def holevo_bound(sc: AttackScenario) -> float:
    """chi = S(sigma_out) - S(sigma_out | heterodyne on the reconciliation
    side), the ceiling on any collective attack."""
    out = apply_channel(tmsv(sc.zeta, ("A", "B")), sc.channel, "B")
    return von_neumann_entropy(out) - von_neumann_entropy(
        condition_heterodyne(out, sc.conditioned_label)
    )


def eve_info(full_state: CovMat, sc: AttackScenario) -> float:
    """S(x:E) = S(Eve) - S(Eve | heterodyne of the reconciliation mode).

    Eve's modes are every label other than A and B.
    """
    eve_labels = tuple(lbl for lbl in full_state.labels if lbl not in ("A", "B"))
    if not eve_labels or len(eve_labels) + 2 != full_state.n_modes:
        raise ValueError(f"state must carry labels A, B and Eve's modes, got {full_state.labels}")
    s_eve = _entropy_of(full_state, eve_labels)
    conditioned = condition_heterodyne(full_state, sc.conditioned_label)
    return s_eve - _entropy_of(conditioned, eve_labels)


def cloner_attack(sc: AttackScenario) -> AttackResult:
    """Entangling-cloner attack on a loss channel.

    Eve holds a tmsv with arm variance matching the channel's excess noise
    and splits Alice's signal on a beam splitter of transmissivity tau. The
    global state is pure, so Eve's information equals the Holevo bound; both
    are computed independently and cross-checked to 1e-9.
    """
    kind = classify(sc.channel)
    if kind not in (ChannelKind.THERMAL_LOSS, ChannelKind.PURE_LOSS, ChannelKind.IDENTITY):
        raise ValueError(f"entangling cloner covers loss channels, not {kind.value}")
    tau, v = sc.channel.tau, sc.channel.v
    alice = tmsv(sc.zeta, ("A", "B"))
    if kind is ChannelKind.THERMAL_LOSS:
        eps = v / (1.0 - tau)
        gamma_e = math.sqrt((eps - 1.0) / (eps + 1.0))
        eve = tmsv(gamma_e, ("E1", "E2"))
    else:
        # pure loss or identity: the cloner degenerates to a vacuum ancilla
        gamma_e = 0.0
        eve = thermal(1.0, "E1")
    full = apply_symplectic(direct_sum(alice, eve), beam_splitter(tau), ("B", "E1"))

    info = eve_info(full, sc)
    chi = holevo_bound(sc)
    if abs(info - chi) > 1e-9:
        raise RuntimeError(
            f"purification check failed: S(x:E) = {info!r} but Holevo bound = {chi!r}"
        )

    a_in = alice.matrix[0, 0]
    c_in = alice.matrix[0, 2]
    ab = partial_trace(full, ("A", "B"))
    tau_eff = (ab.matrix[0, 2] / c_in) ** 2 if c_in else tau
    v_eff = ab.matrix[2, 2] - tau_eff * a_in
    residual = abs(tau_eff - tau) + abs(v_eff - v)

    return AttackResult(
        gamma=gamma_e,
        ent_resource=entropy_of_entanglement(gamma_e),
        eta_star=math.nan,
        kappa_star=math.nan,
        eve_info_bits=info,
        holevo_bits=chi,
        residual=residual,
        feasible=True,
    )


def _is_pure_loss_like(kind: ChannelKind) -> bool:
    return kind in (ChannelKind.PURE_LOSS, ChannelKind.IDENTITY)


def _pipeline_raw(
    input_matrix: np.ndarray,
    input_labels: tuple[str, ...],
    signal_label: str,
    channel: GaussChannel,
    gamma: float,
    eta: float,
    kappa: float,
    g: float,
) -> tuple[np.ndarray, tuple[str, ...]]:
    """All-optical attack circuit on an arbitrary input, environment traced out.

    Resource tmsv(gamma) on (R1, R2); auxiliary tmsv(kappa) on (F1, F2), or a
    single vacuum F1 for pure-loss channels. Order: squeeze (signal, R1) at
    gain g, send the signal through the channel, mix (R2, F1) at eta,
    recombine (signal, R2) at t = 1/g. Tracing the channel's environment
    commutes with the later optics, so the channel map is applied in place of
    its dilation. Returns the raw kept matrix and its labels; the amplified
    entries grow to ~g * a(gamma), which is why no state object is built here.
    """
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"resource squeezing must lie in [0, 1), got {gamma}")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"mixing transmissivity must lie in [0, 1], got {eta}")
    if not 0.0 <= kappa < 1.0:
        raise ValueError(f"auxiliary squeezing must lie in [0, 1), got {kappa}")
    if not (g > 1.0 and math.isfinite(g)):
        raise ValueError(f"amplifier gain must be a finite value > 1, got {g}")

    pure_loss = _is_pure_loss_like(classify(channel))
    if pure_loss and kappa != 0.0:
        raise ValueError("pure-loss channel pins the auxiliary state to vacuum (kappa = 0)")
    aux = thermal(1.0, "F1") if pure_loss else tmsv(kappa, ("F1", "F2"))

    blocks = [input_matrix, tmsv(gamma, ("R1", "R2")).matrix, aux.matrix]
    labels = tuple(input_labels) + ("R1", "R2", "F1") + (() if pure_loss else ("F2",))
    dim = sum(b.shape[0] for b in blocks)
    joint = np.zeros((dim, dim))
    at = 0
    for b in blocks:
        joint[at : at + b.shape[0], at : at + b.shape[0]] = b
        at += b.shape[0]

    n = dim // 2
    slot = {lbl: i for i, lbl in enumerate(labels)}
    sig = slot[signal_label]
    amp = _embed_pair(two_mode_squeezer(g).matrix, n, sig, slot["R1"])
    joint = amp @ joint @ amp.T
    joint = _channel_on_mode(joint, sig, channel.tau, channel.v)
    mix = _embed_pair(beam_splitter(eta).matrix, n, slot["R2"], slot["F1"])
    joint = mix @ joint @ mix.T
    recomb = _embed_pair(beam_splitter(1.0 / g).matrix, n, sig, slot["R2"])
    joint = recomb @ joint @ recomb.T
    return 0.5 * (joint + joint.T), labels


def ao_attack_state(
    sc: AttackScenario, gamma: float, eta: float, kappa: float, g: float
) -> CovMat:
    """Global state of the teleportation attack: Alice's modes (A, B) plus
    Eve's kept modes (R1, R2, F1 and, off pure loss, F2)."""
    alice = tmsv(sc.zeta, ("A", "B"))
    mat, labels = _pipeline_raw(alice.matrix, alice.labels, "B", sc.channel, gamma, eta, kappa, g)
    return CovMat(mat, labels)


def simulation_residual(
    sc: AttackScenario, gamma: float, eta: float, kappa: float, g: float
) -> float:
    """|tau_eff - tau| + |v_eff - v| for the channel the attack actually
    presents between A and B."""

    def transform(probe: CovMat) -> CovMat:
        mat, _ = _pipeline_raw(
            probe.matrix, probe.labels, probe.labels[1], sc.channel, gamma, eta, kappa, g
        )
        # the probe modes occupy the first two slots
        return CovMat(mat[:4, :4], probe.labels)

    eff = effective_channel(transform)
    return abs(eff.tau - sc.channel.tau) + abs(eff.v - sc.channel.v)


def _plain_entropy(mat: np.ndarray) -> float:
    # Entropy from the fast eigensolver alone. Good to ~1e-7 bits on the
    # amplified matrices, which is all the optimizer's comparisons need.
    n = mat.shape[0] // 2
    nus = np.sort(np.abs(np.linalg.eigvals(symplectic_form(n) @ mat)))[::-1][::2]
    return float(sum(_entropy_term(float(nu)) for nu in nus))


def _conditioning_blocks(mat: np.ndarray, labels: tuple[str, ...], meas_label: str):
    meas = labels.index(meas_label)
    rest = [j for j in range(len(labels)) if j != meas]
    rows = np.concatenate([[2 * j, 2 * j + 1] for j in rest])
    mrows = np.array([2 * meas, 2 * meas + 1])
    return mat[np.ix_(rows, rows)], mat[np.ix_(rows, mrows)], mat[np.ix_(mrows, mrows)]


def _eve_info_raw(sc: AttackScenario, gamma: float, eta: float, kappa: float, g: float) -> float:
    """Objective-function twin of eve_info(ao_attack_state(...)) on raw arrays.

    Used inside the optimizer's scan loops; fast but only good to ~1e-6 bits
    on the amplified matrices, so the optimum it locates is polished and
    re-evaluated through the accurate paths before being reported.
    """
    alice = tmsv(sc.zeta, ("A", "B"))
    mat, labels = _pipeline_raw(alice.matrix, alice.labels, "B", sc.channel, gamma, eta, kappa, g)
    s_eve = _plain_entropy(mat[4:, 4:])
    a, c, b = _conditioning_blocks(mat, labels, sc.conditioned_label)
    cond = a - c @ np.linalg.inv(b + np.eye(2)) @ c.T
    # after removing A or B the Eve block starts at the second remaining mode
    return s_eve - _plain_entropy(cond[2:, 2:])


def _eve_info_exact(sc: AttackScenario, gamma: float, eta: float, kappa: float, g: float) -> float:
    """Same quantity as _eve_info_raw through the scale-escalated spectrum
    and conditioning paths: ~1e-12 bits at any amplifier gain, ~50x slower."""
    alice = tmsv(sc.zeta, ("A", "B"))
    mat, labels = _pipeline_raw(alice.matrix, alice.labels, "B", sc.channel, gamma, eta, kappa, g)
    s_eve = sum(_entropy_term(float(nu)) for nu in _symplectic_spectrum(mat[4:, 4:]))
    a, c, b = _conditioning_blocks(mat, labels, sc.conditioned_label)
    if float(np.abs(mat).max()) > _HP_SCALE:
        cond = _schur_heterodyne_hp(a, c, b)
    else:
        cond = a - c @ np.linalg.inv(b + np.eye(2)) @ c.T
    s_cond = sum(_entropy_term(float(nu)) for nu in _symplectic_spectrum(cond[2:, 2:]))
    return s_eve - s_cond


def _ao_v_eff(gamma: float, eta: float, kappa: float, tau: float, v: float, g: float) -> float:
    # Closed form of the attack's added noise at lam = tau. Raw floats on
    # purpose: bisection iterates pass through unphysical intermediate values
    # that CovMat/GaussChannel constructors would reject.
    g2 = gamma * gamma
    a = (1.0 + g2) / (1.0 - g2)
    c = 2.0 * gamma / (1.0 - g2)
    k2 = kappa * kappa
    a_phi = (1.0 + k2) / (1.0 - k2)
    b_eff = eta * a + (1.0 - eta) * a_phi
    c_eff = math.sqrt(eta) * c
    return (
        a * tau
        - 2.0 * c_eff * math.sqrt(tau) * (g - 1.0) / g
        - (a * tau + b_eff - v) / g
        + b_eff
    )


def _feasible_eta_window(gamma: float, tau: float, v: float, lo: float):
    """Exact eta interval on which a vacuum auxiliary undershoots the target
    noise (so that some kappa >= 0 can match it), intersected with [lo, 1].

    Setting v_eff = v at kappa = 0 reduces, after the g-dependent factors
    divide out, to (a-1) s^2 - 2 c sqrt(tau) s + (a tau + 1 - v) = 0 in
    s = sqrt(eta). Between the roots the matching constraint is reachable;
    outside it is not, at any kappa. Returns None when the intersection is
    empty. The interval collapses to {1} at gamma = gamma_min and narrows
    like 1/a around eta ~ tau as gamma -> 1, which is why a fixed grid on
    [lo, 1] cannot be trusted to hit it.
    """
    g2 = gamma * gamma
    a = (1.0 + g2) / (1.0 - g2)
    c = 2.0 * gamma / (1.0 - g2)
    am1 = a - 1.0
    if am1 <= 0.0:
        return None
    disc = c * c * tau - am1 * (a * tau + 1.0 - v)
    if disc < 0.0:
        return None
    root = math.sqrt(disc)
    s_lo = (c * math.sqrt(tau) - root) / am1
    s_hi = (c * math.sqrt(tau) + root) / am1
    # widen by a rounding slack so a window grazing a clamp boundary (the
    # lower root sits exactly at 1 when gamma = gamma_min) keeps its endpoint
    eta_lo = max(s_lo * s_lo - 1e-12, lo)
    eta_hi = min(s_hi * s_hi + 1e-12, 1.0)
    if eta_lo > eta_hi:
        return None
    return eta_lo, eta_hi


def _match_kappa(gamma: float, eta: float, tau: float, v: float, g: float):
    """Auxiliary squeezing that makes the attack's noise equal the channel's,
    or None when no kappa in [0, 1) does."""

    def f(k: float) -> float:
        return _ao_v_eff(gamma, eta, k, tau, v, g) - v

    f0 = f(0.0)
    if abs(f0) <= _ROOT_TOL:
        return 0.0
    if f0 > 0.0:
        return None  # vacuum auxiliary already overshoots the target noise
    lo, hi = 0.0, 0.5
    while f(hi) < 0.0:
        lo = hi
        hi = 0.5 * (hi + 1.0)
        if 1.0 - hi < 1e-13:
            return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) <= _ROOT_TOL:
            return mid
        if fm < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _infeasible(gamma: float, chi: float) -> AttackResult:
    return AttackResult(
        gamma=gamma,
        ent_resource=entropy_of_entanglement(gamma),
        eta_star=math.nan,
        kappa_star=math.nan,
        eve_info_bits=math.nan,
        holevo_bits=chi,
        residual=math.nan,
        feasible=False,
    )


_ETA_GRID_POINTS = 201
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def optimize_attack(sc: AttackScenario, gamma: float, g: float | None = None) -> AttackResult:
    """Best (eta, kappa) for the teleportation attack at a given resource.

    The noise-matching constraint leaves one free direction: eta is scanned
    on a grid, kappa root-found per eta, Eve's information evaluated on the
    exactly matched pairs, and the best eta refined by golden-section search.
    Pure-loss channels skip all of it (eta = tau / gamma^2, kappa = 0). A
    resource below gamma_min, or a grid with no matchable eta, yields an
    infeasible result rather than an error.
    """
    gain = sc.resolved_gain if g is None else float(g)
    ch = sc.channel
    chi = holevo_bound(sc)
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"resource squeezing must lie in [0, 1), got {gamma}")
    if gamma < gamma_min(ch) - 1e-9:
        return _infeasible(gamma, chi)

    if _is_pure_loss_like(classify(ch)):
        eta = min(ch.tau / (gamma * gamma), 1.0)
        info = eve_info(ao_attack_state(sc, gamma, eta, 0.0, gain), sc)
        residual = simulation_residual(sc, gamma, eta, 0.0, gain)
        return AttackResult(
            gamma=gamma,
            ent_resource=entropy_of_entanglement(gamma),
            eta_star=eta,
            kappa_star=0.0,
            eve_info_bits=info,
            holevo_bits=chi,
            residual=residual,
            feasible=residual <= _FEASIBLE_RESIDUAL,
        )

    tau, v = ch.tau, ch.v
    best_info = -math.inf
    best_eta = math.nan
    best_kappa = math.nan

    def probe(eta: float) -> float:
        nonlocal best_info, best_eta, best_kappa
        kappa = _match_kappa(gamma, eta, tau, v, gain)
        if kappa is None:
            return -math.inf
        info = _eve_info_raw(sc, gamma, eta, kappa, gain)
        if info > best_info:
            best_info, best_eta, best_kappa = info, eta, kappa
        return info

    lo = max(0.8 * tau, 1e-4)
    window = _feasible_eta_window(gamma, tau, v, lo)
    if window is None:
        return _infeasible(gamma, chi)
    w_lo, w_hi = window
    etas = [w_lo + (w_hi - w_lo) * i / (_ETA_GRID_POINTS - 1) for i in range(_ETA_GRID_POINTS)]
    values = [probe(e) for e in etas]
    if best_info == -math.inf:
        return _infeasible(gamma, chi)

    i_best = values.index(max(values))
    a = etas[max(i_best - 1, 0)]
    b = etas[min(i_best + 1, _ETA_GRID_POINTS - 1)]
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = probe(x1), probe(x2)
    for _ in range(40):
        if b - a < 1e-7:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = probe(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = probe(x1)

    # the scan objective's ~1e-6 noise leaves the argmax off-peak by a
    # row-to-row varying amount that swamps the true trend in gamma, so
    # refit the peak against the accurate objective: two quadratic steps,
    # then the best exactly evaluated point wins
    exact_seen: dict[float, float] = {}

    def exact_at(eta: float) -> float:
        if eta not in exact_seen:
            kappa = _match_kappa(gamma, eta, tau, v, gain)
            exact_seen[eta] = (
                -math.inf if kappa is None else _eve_info_exact(sc, gamma, eta, kappa, gain)
            )
        return exact_seen[eta]

    width = w_hi - w_lo
    if width < 1e-5:
        exact_at(best_eta)
        exact_at(0.5 * (w_lo + w_hi))
    else:
        center = best_eta
        h1 = width / 100.0
        if min(center - w_lo, w_hi - center) < h1:
            # peak hugs a window edge; kappa matching fails on the widened
            # rim itself, so sample just inside both ends
            exact_at(w_lo + 1e-9 * width)
            exact_at(w_hi - 1e-9 * width)
        for h in (h1, width / 800.0):
            center = min(max(center, w_lo + h), w_hi - h)
            f_lo = exact_at(center - h)
            f_mid = exact_at(center)
            f_hi = exact_at(center + h)
            denom = f_lo - 2.0 * f_mid + f_hi
            if math.isfinite(denom) and denom < 0.0:
                step = 0.5 * h * (f_lo - f_hi) / denom
                center += max(-h, min(h, step))
            else:
                center = max((f_lo, center - h), (f_mid, center), (f_hi, center + h))[1]
        exact_at(min(max(center, w_lo), w_hi))
    best_eta = max(exact_seen, key=lambda e: exact_seen[e])
    best_kappa = _match_kappa(gamma, best_eta, tau, v, gain)

    # authoritative numbers come from the validated state path, not the
    # raw objective used while searching
    info = eve_info(ao_attack_state(sc, gamma, best_eta, best_kappa, gain), sc)
    residual = simulation_residual(sc, gamma, best_eta, best_kappa, gain)
    return AttackResult(
        gamma=gamma,
        ent_resource=entropy_of_entanglement(gamma),
        eta_star=best_eta,
        kappa_star=best_kappa,
        eve_info_bits=info,
        holevo_bits=chi,
        residual=residual,
        feasible=residual <= _FEASIBLE_RESIDUAL,
    )
