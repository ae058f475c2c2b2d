"""
Custom Exception Classes for Photon4N
"""


class Photon4NException(Exception):
    """Base exception for Photon4N application"""
    pass


# Linear network exceptions
class NetworkException(Photon4NException):
    """Base exception for linear-network errors"""
    pass


class InvalidTransmissionException(NetworkException):
    """Raised when a beam-splitter transmission lies outside [0, 1]"""
    pass


class DimensionMismatchException(NetworkException):
    """Raised when an amplitude vector does not match the matrix dimension"""
    pass


# Detection exceptions
class DetectionException(Photon4NException):
    """Base exception for click-model errors"""
    pass


class InvalidDetectorSetException(DetectionException):
    """Raised when a detector set is empty or references a missing detector"""
    pass


class InvalidClassicalInputException(DetectionException):
    """Raised when classical input magnitudes or phases are invalid"""
    pass


# Source model exceptions
class SourceModelException(Photon4NException):
    """Base exception for source-model errors"""
    pass


class WrongLayoutException(SourceModelException):
    """Raised when an operation is applied to an unsupported layout kind"""
    pass


class InvalidSourceParamsException(SourceModelException):
    """Raised when source parameters fall outside their ranges"""
    pass


class InconsistentStatisticsException(SourceModelException):
    """Raised when click statistics admit no real HBT ratio"""
    pass


# Threshold engine exceptions
class ThresholdException(Photon4NException):
    """Base exception for threshold-engine errors"""
    pass


class SolverBoundException(ThresholdException):
    """Raised when the witness optimum sits on the magnitude cap"""

    def __init__(self, message, a=None, magnitudes=None):
        super().__init__(message)
        self.a = a
        self.magnitudes = magnitudes


class InsufficientPointsException(ThresholdException):
    """Raised when a power-law window holds too few curve points"""
    pass


class NoFlipFoundException(ThresholdException):
    """Raised when the critical-ratio scan never changes verdict"""
    pass


class CurveValidationException(ThresholdException):
    """Raised when a threshold curve is not monotone or not concave"""
    pass


# Oracle exceptions
class OracleException(Photon4NException):
    """Base exception for fock-oracle errors"""
    pass


class TailMassException(OracleException):
    """Raised when the Poisson tail beyond the cutoff is too heavy"""
    pass


class ConfigurationException(Photon4NException):
    """Raised when configuration is invalid"""
    pass
