"""Interference-free OFDM for the K-user SISO interference channel with ISI."""

from .channel import (
    ImpulseResponse,
    LargeScaleConfig,
    NetworkChannel,
    sample_network,
    symmetric_tap_grid,
)
from .dof import DofQuery, sum_dof_symmetric, sum_dof_theorem1, tdma_ofdm_dof
from .phy import FrameConfig, make_frame_config, sic_decode, transmit
from .rates import rate_no_csit, rate_with_csit, tdma_ofdm_rate, waterfill
from .sweep import ExperimentConfig, emit_csv, run_sweep

__version__ = "0.1.0"
