"""Uplink performance toolkit for multi-cell mmWave massive MIMO with
low-resolution ADCs: Monte-Carlo ergodic rates under estimated CSI plus the
matching closed-form lower bound, large-N limit, and low-SNR scaling laws."""

__version__ = "0.1.0"

from .config import SystemConfig, distortion_factor, load_config, validate_config
from .channel import ChannelRealization, sample_channel, steering_vector, effective_channel
from .training import TrainingResult, build_codebook, train_beams
from .estimation import EstimationResult, build_pilot_matrix, estimate_all
from .quantize import BussgangModel, bussgang_decompose, lloyd_max_quantize
from .rate import RateReport, ergodic_rate, siqnr
from .bounds import (BoundInputs, BoundReport, asymptotic_limit, bessel_j0,
                     eta1, eta2, eta3, high_pilot_approx, low_snr_approx,
                     lower_bound_rate, single_cell_bound)
from .sweep import SweepSpec, load_preset, run_sweep

__all__ = [
    "SystemConfig", "distortion_factor", "load_config", "validate_config",
    "ChannelRealization", "sample_channel", "steering_vector", "effective_channel",
    "TrainingResult", "build_codebook", "train_beams",
    "EstimationResult", "build_pilot_matrix", "estimate_all",
    "BussgangModel", "bussgang_decompose", "lloyd_max_quantize",
    "RateReport", "ergodic_rate", "siqnr",
    "BoundInputs", "BoundReport", "asymptotic_limit", "bessel_j0",
    "eta1", "eta2", "eta3", "high_pilot_approx", "low_snr_approx",
    "lower_bound_rate", "single_cell_bound",
    "SweepSpec", "load_preset", "run_sweep",
]
