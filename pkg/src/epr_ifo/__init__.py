"""Quantum noise budget of an entanglement-conditioned dual-recycled interferometer."""

__version__ = "0.1.0"

from .conditioning import (
    ChannelPair,
    StrainSpectrum,
    channel_spectra,
    conditional_strain_spectrum,
    fixed_angle_spectrum,
    make_grid,
    rotation_error_penalty,
)
from .errors import (
    ConfigError,
    DegenerateIdler,
    EprIfoError,
    NonPositiveFrequency,
    NoSolutionInRange,
    UnreachableBandwidth,
)
from .imperfections import (
    CavityLossNoise,
    FirstOrderLoss,
    LossBudget,
    PhaseJitter,
    apply_io_losses,
    cavity_loss_noise,
    first_order_loss_correction,
    phase_jitter_spectrum,
)
from .interferometer import (
    IdlerResponse,
    IfoParams,
    SignalResponse,
    SrcMirror,
    compensation_phase,
    derived_bandwidth,
    idler_response,
    kimble_coupling,
    quoted_compensation_phase,
    required_rotation,
    signal_response,
    src_effective_mirror,
    strain_sql,
)
from .solver import (
    SolverSolution,
    SolverTarget,
    bandwidth_from_phi,
    solve,
    solve_detuning,
    solve_lengths,
    target_filter_params,
)
from .twophoton import (
    EprSource,
    QuadratureVector,
    SpectralMatrix,
    condition_gaussian,
    epr_joint_spectrum,
    quadrature_rotate,
    squeeze_db_to_r,
)

__all__ = [
    "__version__",
    "ChannelPair",
    "StrainSpectrum",
    "channel_spectra",
    "conditional_strain_spectrum",
    "fixed_angle_spectrum",
    "make_grid",
    "rotation_error_penalty",
    "ConfigError",
    "DegenerateIdler",
    "EprIfoError",
    "NonPositiveFrequency",
    "NoSolutionInRange",
    "UnreachableBandwidth",
    "CavityLossNoise",
    "FirstOrderLoss",
    "LossBudget",
    "PhaseJitter",
    "apply_io_losses",
    "cavity_loss_noise",
    "first_order_loss_correction",
    "phase_jitter_spectrum",
    "IdlerResponse",
    "IfoParams",
    "SignalResponse",
    "SrcMirror",
    "compensation_phase",
    "derived_bandwidth",
    "idler_response",
    "kimble_coupling",
    "quoted_compensation_phase",
    "required_rotation",
    "signal_response",
    "src_effective_mirror",
    "strain_sql",
    "SolverSolution",
    "SolverTarget",
    "bandwidth_from_phi",
    "solve",
    "solve_detuning",
    "solve_lengths",
    "target_filter_params",
    "EprSource",
    "QuadratureVector",
    "SpectralMatrix",
    "condition_gaussian",
    "epr_joint_spectrum",
    "quadrature_rotate",
    "squeeze_db_to_r",
]
