"""
Source Module - realistic single-photon sources rho_eta (x) rho_nbar
"""
from .source_model import (
    HbtRatio, PhotonPlacement, SourceParams,
    hbt_approximation, hbt_ratio_estimate, linear_threshold_ratio, mz_coherence_factor, mz_linear_threshold,
    mz_model_threshold, mz_photon_placement, mz_prefactor, noise_detector_means,
    photon_placement, signal_click_sets, single_copy_click_stats, source_click_stats,
    source_no_click, two_copy_click_stats, two_copy_tolerant_threshold,
    two_photon_output_distribution,
)

__all__ = [
    'HbtRatio', 'PhotonPlacement', 'SourceParams',
    'hbt_approximation', 'hbt_ratio_estimate', 'linear_threshold_ratio', 'mz_coherence_factor', 'mz_linear_threshold',
    'mz_model_threshold', 'mz_photon_placement', 'mz_prefactor', 'noise_detector_means',
    'photon_placement', 'signal_click_sets', 'single_copy_click_stats', 'source_click_stats',
    'source_no_click', 'two_copy_click_stats', 'two_copy_tolerant_threshold',
    'two_photon_output_distribution',
]
