"""Coherence of quantum channels via the alpha-z relative Renyi entropy."""

from .coherence import (
    CoherenceResult,
    Method,
    OptimizerOptions,
    check_additivity,
    coherence_channel,
    coherence_channel_z1,
    coherence_commutativity,
    coherence_state,
    coherence_z1,
    commutativity_divergence,
    is_detection_creation_incoherent,
    oracle_min_diag,
    oracle_sup_pure,
)
from .entropy import AlphaZ, DivergenceValue, Regime, classify, d_alpha_z, d_alpha_z_channels, f_alpha_z, relative_entropy
from .errors import (
    ChannelFormatError,
    CoherenceError,
    DimensionMismatch,
    DimensionTooLarge,
    InvalidAlpha,
    InvalidRegime,
    NoConvergence,
    NotCPTP,
    NotHermitian,
    NotPSD,
    ParamOutOfRange,
)
from .linalg import eig_hermitian, jacobi_eigh, psd_power, support_projector
from .quantum import (
    ChoiState,
    DensityMatrix,
    KrausChannel,
    PureState,
    apply,
    choi_state,
    compose,
    dephase,
    dephasing_channel,
    identity_channel,
    kraus_from_choi,
    load_channel,
    mixture,
    partial_trace,
    random_channel,
    random_state,
    save_channel,
    unitary_channel,
)
from .zoo import ChannelKind, NamedChannel, make, reference_value

__version__ = "0.1.0"

__all__ = [
    "AlphaZ",
    "ChannelFormatError",
    "ChannelKind",
    "ChoiState",
    "CoherenceError",
    "CoherenceResult",
    "DensityMatrix",
    "DimensionMismatch",
    "DimensionTooLarge",
    "DivergenceValue",
    "InvalidAlpha",
    "InvalidRegime",
    "KrausChannel",
    "Method",
    "NamedChannel",
    "NoConvergence",
    "NotCPTP",
    "NotHermitian",
    "NotPSD",
    "OptimizerOptions",
    "ParamOutOfRange",
    "PureState",
    "Regime",
    "apply",
    "check_additivity",
    "choi_state",
    "classify",
    "coherence_channel",
    "coherence_channel_z1",
    "coherence_commutativity",
    "coherence_state",
    "coherence_z1",
    "commutativity_divergence",
    "compose",
    "d_alpha_z",
    "d_alpha_z_channels",
    "dephase",
    "dephasing_channel",
    "eig_hermitian",
    "f_alpha_z",
    "identity_channel",
    "is_detection_creation_incoherent",
    "jacobi_eigh",
    "kraus_from_choi",
    "load_channel",
    "make",
    "mixture",
    "oracle_min_diag",
    "oracle_sup_pure",
    "partial_trace",
    "psd_power",
    "random_channel",
    "random_state",
    "reference_value",
    "relative_entropy",
    "save_channel",
    "support_projector",
    "unitary_channel",
]
