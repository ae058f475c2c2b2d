"""
Simulation Module - CLI-level runs and their reports
"""
from .reporter import RunReporter
from .runner import FIGURES, ExperimentRunner

__all__ = ['ExperimentRunner', 'FIGURES', 'RunReporter']
