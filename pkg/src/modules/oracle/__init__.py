"""
Oracle Module - truncated Fock-space cross-check of the analytic click statistics
"""
from .fock_oracle import (
    FockPropagator, JointPhotonDist, build_phase_randomized_dist, build_source_dist,
    fock_output_distribution, oracle_click_stats, pattern_stats, permanent,
    propagate_and_click,
)

__all__ = [
    'FockPropagator', 'JointPhotonDist', 'build_phase_randomized_dist', 'build_source_dist',
    'fock_output_distribution', 'oracle_click_stats', 'pattern_stats', 'permanent',
    'propagate_and_click',
]
