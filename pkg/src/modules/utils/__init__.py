"""
Utils Module - Utility functions and helpers
"""

from .exporter import ResultExporter
from .logger import get_logger, PhotonLogger
from .validator import ParameterValidator
from .exceptions import *

__all__ = [
    'ResultExporter',
    'get_logger',
    'PhotonLogger',
    'ParameterValidator'
]
