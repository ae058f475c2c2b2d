"""
Detection Module - click statistics of classical light
"""
from .click_model import (
    ClassicalInput, ClickStats, DetectorModel, DetectorSet, Provenance,
    all_click_prob, bessel_no_click, classical_click_stats, inclusion_exclusion,
    no_click_prob, pattern_probabilities, phase_averaged_no_click,
)

__all__ = [
    'ClassicalInput', 'ClickStats', 'DetectorModel', 'DetectorSet', 'Provenance',
    'all_click_prob', 'bessel_no_click', 'classical_click_stats', 'inclusion_exclusion',
    'no_click_prob', 'pattern_probabilities', 'phase_averaged_no_click',
]
