"""
Threshold Module - witness maximisation, threshold curves and verdicts
"""
from .witness import WitnessOptimizer, WitnessOptimum, maximize_witness, mz_phase_scan
from .curve import (
    PowerLawFit, ThresholdCurve, default_a_values, power_law_fit,
    threshold_curve, upper_concave_hull,
)
from .classifier import (
    CriticalRatio, Verdict, critical_noise_ratio, is_nonclassical,
    ratio_difference, witness_value, witness_violation,
)
from .curve_io import load_curve, save_curve

__all__ = [
    'WitnessOptimizer', 'WitnessOptimum', 'maximize_witness', 'mz_phase_scan',
    'PowerLawFit', 'ThresholdCurve', 'default_a_values', 'power_law_fit',
    'threshold_curve', 'upper_concave_hull',
    'CriticalRatio', 'Verdict', 'critical_noise_ratio', 'is_nonclassical',
    'ratio_difference', 'witness_value', 'witness_violation',
    'load_curve', 'save_curve',
]
