"""
Parameter Validation Module - Validate physical parameters and curve shapes
"""

import math
from typing import Iterable, Tuple

import numpy as np

from .exceptions import (
    ConfigurationException,
    CurveValidationException,
    InvalidDetectorSetException,
    InvalidSourceParamsException,
    InvalidTransmissionException,
)
from .logger import get_logger

logger = get_logger(__name__)


class ParameterValidator:
    """
    Validator for transmissions, probabilities, detector sets and curves
    """

    @staticmethod
    def validate_unit_interval(value, name: str = "value") -> Tuple[bool, str]:
        """
        Check that a value is a finite real in [0, 1]

        Returns:
            Tuple of (is_valid, error_message)
        """
        try:
            value = float(value)
        except (TypeError, ValueError):
            return False, f"{name} is not numeric: {value!r}"
        if not math.isfinite(value):
            return False, f"{name} is not finite: {value}"
        if value < 0.0 or value > 1.0:
            return False, f"{name} must lie in [0, 1], got {value}"
        return True, ""

    @staticmethod
    def validate_nonnegative(value, name: str = "value") -> Tuple[bool, str]:
        try:
            value = float(value)
        except (TypeError, ValueError):
            return False, f"{name} is not numeric: {value!r}"
        if not math.isfinite(value) or value < 0.0:
            return False, f"{name} must be finite and >= 0, got {value}"
        return True, ""

    @staticmethod
    def validate_detector_set(indices: Iterable[int], dim: int) -> Tuple[bool, str]:
        """Detector sets are nonempty subsets of {1..dim}"""
        indices = list(indices)
        if not indices:
            return False, "Detector set is empty"
        bad = [i for i in indices if not isinstance(i, (int, np.integer)) or i < 1 or i > dim]
        if bad:
            return False, f"Detector indices {bad} outside 1..{dim}"
        return True, ""

    @staticmethod
    def validate_curve_shape(p_error, p_success, tol: float = 1e-10) -> Tuple[bool, str]:
        """
        Threshold curves are sorted by P_e, nondecreasing in P_s and concave
        (every middle point on or above the chord of its neighbours)
        """
        x = np.asarray(p_error, dtype=float)
        y = np.asarray(p_success, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            return False, "Curve columns have mismatched shapes"
        if len(x) == 0:
            return False, "Curve is empty"
        if np.any((x < 0) | (x > 1) | (y < 0) | (y > 1)):
            return False, "Curve probabilities outside [0, 1]"
        if np.any(np.diff(x) < 0):
            return False, "Curve is not sorted by p_error"
        if np.any(np.diff(y) < -tol):
            return False, "Curve p_success_max decreases along p_error"
        for i in range(1, len(x) - 1):
            x0, x1, x2 = x[i - 1], x[i], x[i + 1]
            if x2 <= x0:
                continue
            chord = y[i - 1] + (y[i + 1] - y[i - 1]) * (x1 - x0) / (x2 - x0)
            if y[i] < chord - tol:
                return False, f"Curve is not concave at point {i} (p_error={x1:.3e})"
        return True, ""


# Convenience functions
def validate_transmission(t) -> float:
    """Validate a transmission and return it as float"""
    is_valid, message = ParameterValidator.validate_unit_interval(t, "transmission")
    if not is_valid:
        raise InvalidTransmissionException(message)
    return float(t)


def validate_probability(p, name: str = "probability") -> float:
    is_valid, message = ParameterValidator.validate_unit_interval(p, name)
    if not is_valid:
        raise InvalidSourceParamsException(message)
    return float(p)


def validate_mean_photons(nbar, name: str = "nbar") -> float:
    is_valid, message = ParameterValidator.validate_nonnegative(nbar, name)
    if not is_valid:
        raise InvalidSourceParamsException(message)
    return float(nbar)


def validate_detector_set(indices, dim: int) -> frozenset:
    is_valid, message = ParameterValidator.validate_detector_set(indices, dim)
    if not is_valid:
        raise InvalidDetectorSetException(message)
    return frozenset(int(i) for i in indices)


def validate_curve_shape(p_error, p_success, tol: float = 1e-10) -> bool:
    is_valid, message = ParameterValidator.validate_curve_shape(p_error, p_success, tol)
    if not is_valid:
        raise CurveValidationException(message)
    return True


def validate_range(value, low, high, name: str):
    """Config-level range check"""
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigurationException(f"{name} is not numeric: {value!r}")
    if not (low <= value <= high):
        raise ConfigurationException(f"{name}={value} outside [{low}, {high}]")
    return value
