"""Covariance-matrix simulation of teleportation-based eavesdropping attacks
on continuous-variable quantum key distribution."""

from .attacks import (
    AttackResult,
    AttackScenario,
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
from .channels import (
    ChannelKind,
    GaussChannel,
    apply_channel,
    classify,
    dilation,
    effective_channel,
    is_entanglement_breaking,
)
from .gaussian import (
    CovMat,
    Symplectic,
    TwoModeStd,
    apply_symplectic,
    beam_splitter,
    condition_heterodyne,
    condition_homodyne,
    direct_sum,
    partial_trace,
    symplectic_eigenvalues,
    thermal,
    tmsv,
    two_mode_squeezer,
    von_neumann_entropy,
)
from .keyrate import (
    SweepRow,
    SweepTable,
    default_gamma_grid,
    key_rate,
    mutual_information,
    sweep,
)
from .teleportation import (
    ASYMPTOTIC_GAIN,
    ResourceState,
    TeleportConfig,
    ao_effective_channel,
    ao_simulate,
    bk_effective_channel,
)

__version__ = "0.1.0"

__all__ = [
    "ASYMPTOTIC_GAIN",
    "AttackResult",
    "AttackScenario",
    "ChannelKind",
    "CovMat",
    "GaussChannel",
    "ResourceState",
    "SweepRow",
    "SweepTable",
    "Symplectic",
    "TeleportConfig",
    "TwoModeStd",
    "ao_attack_state",
    "ao_effective_channel",
    "ao_simulate",
    "apply_channel",
    "apply_symplectic",
    "beam_splitter",
    "bk_effective_channel",
    "classify",
    "cloner_attack",
    "condition_heterodyne",
    "condition_homodyne",
    "default_gamma_grid",
    "dilation",
    "direct_sum",
    "effective_channel",
    "entanglement_lower_bound",
    "entropy_of_entanglement",
    "eve_info",
    "gamma_min",
    "holevo_bound",
    "is_entanglement_breaking",
    "key_rate",
    "mutual_information",
    "optimize_attack",
    "partial_trace",
    "simulation_residual",
    "sweep",
    "symplectic_eigenvalues",
    "thermal",
    "tmsv",
    "two_mode_squeezer",
    "von_neumann_entropy",
]
