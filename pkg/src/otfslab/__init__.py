"""Delay-Doppler (OTFS) link simulation and diversity analysis toolkit."""

from .analysis import (
    BoundCurve,
    PAIR_ENUMERATION_CAP,
    RankReport,
    ber_lower_bound,
    ber_lower_bound_asymptotic,
    block_circulant_eigs,
    build_symbol_matrix,
    build_symbol_matrix_frac,
    enumerate_rank_one_pairs,
    estimate_diversity_slope,
    matrix_rank,
    min_rank_over_pairs,
    pep_chernoff_upper,
    pep_exact_rank_one,
    rank_one_singular_value,
    union_upper_bound,
)
from .channel import (
    ChannelProfile,
    EffectiveChannel,
    PathSpec,
    build_H_fractional,
    build_H_integer,
    corner_taps,
    full_grid_taps,
    gen_gains,
    gen_jakes_dopplers,
    profile_from_taps,
    quantize_doppler,
)
from .config import ExperimentConfig, config_from_dict, config_from_toml
from .detect import DetectionResult, count_bit_errors, ml_detect, mmse_detect
from .errors import (
    ComplexityError,
    ConfigurationError,
    NumericalError,
    OtfslabError,
    UnsupportedOperationError,
)
from .grid import Alphabet, DDFrame, OtfsGrid, devectorize, make_alphabet, vectorize
from .harness import (
    CompareResult,
    SnrPoint,
    SweepResult,
    chain_equivalence_report,
    run_ber_sweep,
    run_bounds,
    run_compare,
    run_rank_analysis,
    snr_at_ber,
    snr_gain_at_ber,
    sweep_to_csv,
)
from .mimo import MimoConfig, build_H_mimo, gen_mimo_profiles, mimo_min_rank
from .modem import (
    PhaseRotation,
    apply_td_channel,
    default_phi,
    heisenberg,
    isfft,
    phase_derotate,
    phase_rotate,
    sfft,
    wigner,
)
from .ofdm import (
    OfdmConfig,
    cp_for_profile,
    ofdm_apply_channel,
    ofdm_demodulate,
    ofdm_effective_matrices,
    ofdm_mmse_detect,
    ofdm_modulate,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "BoundCurve",
    "ChannelProfile",
    "CompareResult",
    "ComplexityError",
    "ConfigurationError",
    "DDFrame",
    "DetectionResult",
    "EffectiveChannel",
    "ExperimentConfig",
    "MimoConfig",
    "NumericalError",
    "OfdmConfig",
    "OtfsGrid",
    "OtfslabError",
    "PAIR_ENUMERATION_CAP",
    "PathSpec",
    "PhaseRotation",
    "RankReport",
    "SnrPoint",
    "SweepResult",
    "UnsupportedOperationError",
    "apply_td_channel",
    "ber_lower_bound",
    "ber_lower_bound_asymptotic",
    "block_circulant_eigs",
    "build_H_fractional",
    "build_H_integer",
    "build_H_mimo",
    "build_symbol_matrix",
    "build_symbol_matrix_frac",
    "chain_equivalence_report",
    "config_from_dict",
    "config_from_toml",
    "corner_taps",
    "count_bit_errors",
    "cp_for_profile",
    "default_phi",
    "devectorize",
    "enumerate_rank_one_pairs",
    "estimate_diversity_slope",
    "full_grid_taps",
    "gen_gains",
    "gen_jakes_dopplers",
    "gen_mimo_profiles",
    "heisenberg",
    "isfft",
    "make_alphabet",
    "matrix_rank",
    "mimo_min_rank",
    "min_rank_over_pairs",
    "ml_detect",
    "mmse_detect",
    "ofdm_apply_channel",
    "ofdm_demodulate",
    "ofdm_effective_matrices",
    "ofdm_mmse_detect",
    "ofdm_modulate",
    "pep_chernoff_upper",
    "pep_exact_rank_one",
    "phase_derotate",
    "phase_rotate",
    "profile_from_taps",
    "quantize_doppler",
    "rank_one_singular_value",
    "run_ber_sweep",
    "run_bounds",
    "run_compare",
    "run_rank_analysis",
    "sfft",
    "snr_at_ber",
    "snr_gain_at_ber",
    "sweep_to_csv",
    "union_upper_bound",
    "vectorize",
    "wigner",
]
