"""Link-level simulator for a 2x2 LTE-style OFDM downlink.

Pilot-based LS, LMMSE and hybrid channel estimation over Rayleigh tap-delay
channels, with true inter-symbol/inter-carrier interference when the channel
exceeds the cyclic prefix, and a reproducible MSE/BER-versus-SNR sweep CLI.
"""

from .channel import (
    ChannelRealization,
    NoiseSpec,
    PowerDelayProfile,
    add_awgn,
    apply_channel,
    channel_frequency_response,
    generate_channel,
)
from .estimation import (
    ChannelEstimate,
    CorrelationModel,
    EstimatorUsed,
    HybridPolicy,
    beta_for_constellation,
    build_correlation_model,
    calibrate_threshold,
    hybrid_estimate,
    interpolate_ls,
    lmmse_estimate_full,
    lmmse_estimate_simplified,
    ls_estimate,
)
from .grid import (
    CellLabel,
    Constellation,
    PilotPattern,
    ResourceGrid,
    SystemConfig,
    build_pilot_pattern,
    extract_pilots,
    map_to_grid,
)
from .harness import (
    Estimator,
    SweepConfig,
    SweepRecord,
    compute_ber,
    compute_mse,
    emit_csv,
    run_sweep,
    run_trial,
)
from .linkproc import qpsk_demap, qpsk_map, zf_detect
from .ofdm import (
    DftSpec,
    TimeDomainSignal,
    dft_coefficient,
    ofdm_demodulate,
    ofdm_modulate,
)

__version__ = "0.1.0"

__all__ = [
    "CellLabel",
    "ChannelEstimate",
    "ChannelRealization",
    "Constellation",
    "CorrelationModel",
    "DftSpec",
    "Estimator",
    "EstimatorUsed",
    "HybridPolicy",
    "NoiseSpec",
    "PilotPattern",
    "PowerDelayProfile",
    "ResourceGrid",
    "SweepConfig",
    "SweepRecord",
    "SystemConfig",
    "TimeDomainSignal",
    "add_awgn",
    "apply_channel",
    "beta_for_constellation",
    "build_correlation_model",
    "build_pilot_pattern",
    "calibrate_threshold",
    "channel_frequency_response",
    "compute_ber",
    "compute_mse",
    "dft_coefficient",
    "emit_csv",
    "extract_pilots",
    "generate_channel",
    "hybrid_estimate",
    "interpolate_ls",
    "lmmse_estimate_full",
    "lmmse_estimate_simplified",
    "ls_estimate",
    "map_to_grid",
    "ofdm_demodulate",
    "ofdm_modulate",
    "qpsk_demap",
    "qpsk_map",
    "run_sweep",
    "run_trial",
    "zf_detect",
]
