"""
Click Model - click/no-click statistics of classical coherent light

SPADs only tell click from no click, so every statistic follows from the
no-click probabilities P0(K) = prod_{i in K} exp(-nu_i |alpha'_i|^2) of the
propagated amplitudes. Phase-randomized inputs are averaged over their
relative phases with the uniform trapezoid rule on [0, 2pi).
"""
import itertools
import os
import sys
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, FrozenSet, Iterable, Optional, Tuple

import numpy as np
from scipy.special import i0e

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '../../')))
import config
from modules.network.layouts import LayoutSpec
from modules.network.transfer import propagate
from modules.utils.exceptions import (
    DetectionException,
    DimensionMismatchException,
    InvalidClassicalInputException,
    InvalidDetectorSetException,
)
from modules.utils.validator import ParameterValidator, validate_detector_set
from modules.utils.logger import get_logger

logger = get_logger(__name__)

# float slack tolerated on the ordering P_e <= P_s before clipping
_ORDER_SLACK = 1e-12


class Provenance(str, Enum):
    CLASSICAL = 'classical'
    SOURCE = 'source'
    INGESTED = 'ingested'
    ORACLE = 'oracle'


@dataclass(frozen=True)
class DetectorSet:
    """Group K of detectors, 1-based"""
    indices: FrozenSet[int]

    @classmethod
    def of(cls, indices: Iterable[int], dim: int) -> 'DetectorSet':
        return cls(validate_detector_set(indices, dim))

    def zero_based(self) -> Tuple[int, ...]:
        return tuple(sorted(i - 1 for i in self.indices))


@dataclass(frozen=True)
class DetectorModel:
    """Per-detector efficiencies nu_i"""
    efficiencies: Tuple[float, ...]

    def __post_init__(self):
        effs = tuple(float(e) for e in self.efficiencies)
        for e in effs:
            is_valid, message = ParameterValidator.validate_unit_interval(e, "detector efficiency")
            if not is_valid:
                raise InvalidDetectorSetException(message)
        object.__setattr__(self, 'efficiencies', effs)

    @classmethod
    def ideal(cls, dim: int) -> 'DetectorModel':
        return cls(tuple([1.0] * dim))

    @classmethod
    def uniform(cls, dim: int, nu: float) -> 'DetectorModel':
        return cls(tuple([nu] * dim))

    @property
    def nu(self) -> np.ndarray:
        return np.asarray(self.efficiencies, dtype=float)


@dataclass(frozen=True)
class ClassicalInput:
    """Coherent magnitudes per signal port, optionally phase-randomized"""
    magnitudes: Tuple[float, ...]
    phase_randomized: bool = True
    fixed_phases: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        mags = tuple(float(m) for m in self.magnitudes)
        if not mags:
            raise InvalidClassicalInputException("Classical input needs at least one magnitude")
        if any(not np.isfinite(m) or m < 0 for m in mags):
            raise InvalidClassicalInputException(f"Magnitudes must be finite and >= 0, got {mags}")
        phases = tuple(float(p) for p in self.fixed_phases) or tuple([0.0] * len(mags))
        if len(phases) != len(mags):
            raise InvalidClassicalInputException(
                f"{len(phases)} fixed phases for {len(mags)} magnitudes"
            )
        object.__setattr__(self, 'magnitudes', mags)
        object.__setattr__(self, 'fixed_phases', phases)

    @property
    def total_intensity(self) -> float:
        return float(sum(m * m for m in self.magnitudes))


@dataclass(frozen=True)
class ClickStats:
    """(P_s, P_e) pair with provenance and, when known, the layout label"""
    p_success: float
    p_error: float
    provenance: Provenance = Provenance.CLASSICAL
    layout_label: Optional[str] = None

    def __post_init__(self):
        ps, pe = float(self.p_success), float(self.p_error)
        if not (-_ORDER_SLACK <= pe <= ps + _ORDER_SLACK and ps <= 1.0 + _ORDER_SLACK):
            raise DetectionException(
                f"Click statistics violate 0 <= P_e <= P_s <= 1: P_s={ps}, P_e={pe}"
            )
        ps = min(max(ps, 0.0), 1.0)
        pe = min(max(pe, 0.0), ps)
        object.__setattr__(self, 'p_success', ps)
        object.__setattr__(self, 'p_error', pe)
        object.__setattr__(self, 'provenance', Provenance(self.provenance))

    def witness(self, a: float) -> float:
        """W_a = P_s + a P_e"""
        return self.p_success + a * self.p_error


# ──────────────────────────────────────────────
# No-click probabilities
# ──────────────────────────────────────────────

def _detector_indices(k, dim: int) -> Tuple[int, ...]:
    if isinstance(k, DetectorSet):
        validate_detector_set(k.indices, dim)
        return k.zero_based()
    return tuple(sorted(i - 1 for i in validate_detector_set(k, dim)))


def _check_detectors(det: DetectorModel, dim: int):
    if len(det.efficiencies) != dim:
        raise DimensionMismatchException(
            f"Detector model has {len(det.efficiencies)} efficiencies for {dim} outputs"
        )


def no_click_prob(outputs, k, det: DetectorModel):
    """
    P0(K) = prod_{i in K} exp(-nu_i |alpha'_i|^2)

    `outputs` may carry leading batch axes; the last axis indexes detectors.
    """
    outputs = np.asarray(outputs, dtype=complex)
    dim = outputs.shape[-1]
    _check_detectors(det, dim)
    idx = list(_detector_indices(k, dim))
    x = det.nu[idx] * np.abs(outputs[..., idx]) ** 2
    return np.exp(-np.sum(x, axis=-1))


def all_click_prob(outputs, pattern, det: DetectorModel):
    """
    Probability that every detector of `pattern` clicks for a coherent output

    Coherent outputs are independent per detector, so this is the product of
    -expm1(-nu_i x_i); it equals the inclusion-exclusion sum of no-click terms
    without its cancellation at small intensities.
    """
    outputs = np.asarray(outputs, dtype=complex)
    dim = outputs.shape[-1]
    _check_detectors(det, dim)
    idx = list(_detector_indices(pattern, dim))
    x = det.nu[idx] * np.abs(outputs[..., idx]) ** 2
    return np.prod(-np.expm1(-x), axis=-1)


def inclusion_exclusion(pattern: Iterable[int], no_click: Callable[[FrozenSet[int]], float]) -> float:
    """
    P(all of S click) = sum_{K subset of S} (-1)^|K| P0(K), with P0(empty) = 1

    For S = {1, 2} this is 1 - P0(1) - P0(2) + P0(1,2).
    """
    pattern = sorted(pattern)
    total = 0.0
    for size in range(len(pattern) + 1):
        sign = -1.0 if size % 2 else 1.0
        for subset in itertools.combinations(pattern, size):
            total += sign * (1.0 if size == 0 else no_click(frozenset(subset)))
    return total


# ──────────────────────────────────────────────
# Phase averaging
# ──────────────────────────────────────────────

def phase_nodes(quad: Optional[int] = None) -> np.ndarray:
    quad = config.QUADRATURE_CONFIG['nodes'] if quad is None else int(quad)
    if quad < config.QUADRATURE_CONFIG['min_nodes']:
        raise InvalidClassicalInputException(
            f"Quadrature needs at least {config.QUADRATURE_CONFIG['min_nodes']} nodes, got {quad}"
        )
    return 2.0 * np.pi * np.arange(quad) / quad


def input_vectors(layout: LayoutSpec, magnitudes, phases) -> np.ndarray:
    """
    Place magnitudes * exp(i phase) on the layout's signal ports

    magnitudes: (..., n_in); phases: (P, n_in) -> amplitudes (..., P, dim)
    """
    magnitudes = np.asarray(magnitudes, dtype=float)
    phases = np.atleast_2d(np.asarray(phases, dtype=float))
    n_in = len(layout.input_ports)
    if magnitudes.shape[-1] != n_in:
        raise DimensionMismatchException(
            f"Layout '{layout.kind.value}' takes {n_in} inputs, got {magnitudes.shape[-1]}"
        )
    signal = magnitudes[..., None, :] * np.exp(1j * phases)
    v = np.zeros(signal.shape[:-1] + (layout.dim,), dtype=complex)
    v[..., list(layout.input_ports)] = signal
    return v


def relative_phase_grid(n_inputs: int, quad: Optional[int] = None) -> np.ndarray:
    """
    Relative-phase nodes for n inputs: the first input stays at phase 0, the
    others run over the product trapezoid grid; global phase drops out of
    every |alpha'_i|^2
    """
    if n_inputs <= 1:
        return np.zeros((1, max(n_inputs, 1)))
    nodes = phase_nodes(quad)
    mesh = np.meshgrid(*([nodes] * (n_inputs - 1)), indexing='ij')
    rel = np.stack([m.ravel() for m in mesh], axis=-1)
    return np.concatenate([np.zeros((rel.shape[0], 1)), rel], axis=-1)


def _phases_for(layout: LayoutSpec, inp: ClassicalInput, quad: Optional[int]) -> np.ndarray:
    n_in = len(layout.input_ports)
    if len(inp.magnitudes) != n_in:
        raise DimensionMismatchException(
            f"Layout '{layout.kind.value}' takes {n_in} inputs, got {len(inp.magnitudes)}"
        )
    lit = sum(1 for m in inp.magnitudes if m > 0)
    if not inp.phase_randomized or lit <= 1:
        # a single lit port has no interference partner
        return np.asarray([inp.fixed_phases])
    return relative_phase_grid(n_in, quad)


def phase_averaged_no_click(layout: LayoutSpec, inp: ClassicalInput, k, det: DetectorModel,
                            quad: Optional[int] = None) -> float:
    """
    Uniform average of P0(K) over the relative input phases

    The internal Mach-Zehnder phase is a layout parameter and is never
    averaged here.
    """
    if not inp.phase_randomized:
        raise InvalidClassicalInputException("Phase averaging needs a phase-randomized input")
    phases = _phases_for(layout, inp, quad)
    outputs = propagate(layout.matrix(), input_vectors(layout, inp.magnitudes, phases))
    return float(np.mean(no_click_prob(outputs, k, det)))


def bessel_no_click(layout: LayoutSpec, inp: ClassicalInput, k, det: DetectorModel) -> float:
    """
    Closed form for two phase-randomized inputs: exp(-X) I0(2|C|)

    X is the phase-independent intensity reaching K and C the cross term.
    Fast path only; quadrature stays the primary route.
    """
    if len(inp.magnitudes) != 2 or len(layout.input_ports) != 2:
        raise DimensionMismatchException("Bessel closed form covers exactly two inputs")
    m = layout.matrix().entries
    _check_detectors(det, layout.dim)
    idx = list(_detector_indices(k, layout.dim))
    nu = det.nu[idx]
    a = m[idx, layout.input_ports[0]] * inp.magnitudes[0]
    b = m[idx, layout.input_ports[1]] * inp.magnitudes[1]
    x = float(np.sum(nu * (np.abs(a) ** 2 + np.abs(b) ** 2)))
    c = abs(complex(np.sum(nu * np.conj(a) * b)))
    # exp(-x) I0(2c) = exp(-(x - 2c)) i0e(2c), x >= 2c keeps it bounded
    return float(np.exp(-(x - 2.0 * c)) * i0e(2.0 * c))


# ──────────────────────────────────────────────
# Success / error statistics
# ──────────────────────────────────────────────

def pattern_probabilities(layout: LayoutSpec, magnitudes, det: DetectorModel,
                          quad: Optional[int] = None, phase_randomized: bool = True,
                          fixed_phases=None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorised (P_s, P_e) for a batch of magnitude tuples, shape (..., n_in)

    Used by the witness optimizer; averaging runs over the relative phases
    when the input is phase-randomized.
    """
    magnitudes = np.asarray(magnitudes, dtype=float)
    n_in = len(layout.input_ports)
    if phase_randomized and n_in > 1:
        phases = relative_phase_grid(n_in, quad)
    else:
        fixed = np.zeros(n_in) if fixed_phases is None else np.asarray(fixed_phases, dtype=float)
        phases = fixed[None, :]
    outputs = propagate(layout.matrix(), input_vectors(layout, magnitudes, phases))
    p_s = np.mean(all_click_prob(outputs, layout.success_pattern, det), axis=-1)
    p_e = np.mean(all_click_prob(outputs, layout.error_pattern, det), axis=-1)
    return p_s, p_e


def classical_click_stats(layout: LayoutSpec, inp: ClassicalInput, det: DetectorModel,
                          quad: Optional[int] = None, method: str = 'stable') -> ClickStats:
    """
    P_s and P_e of a classical input for the layout's success/error patterns

    method='stable' averages the per-detector product form; method=
    'inclusion_exclusion' sums phase-averaged no-click probabilities exactly
    as P_s = 1 - P0(1) - P0(2) + P0(1,2) etc. Both agree; the second loses
    relative accuracy once P_e drops below ~1e-10.
    """
    _check_detectors(det, layout.dim)
    if len(inp.magnitudes) != len(layout.input_ports):
        raise DimensionMismatchException(
            f"Layout '{layout.kind.value}' takes {len(layout.input_ports)} inputs, got {len(inp.magnitudes)}"
        )

    if method == 'inclusion_exclusion':
        phases = _phases_for(layout, inp, quad)
        outputs = propagate(layout.matrix(), input_vectors(layout, inp.magnitudes, phases))

        def p0(subset):
            return float(np.mean(no_click_prob(outputs, subset, det)))

        p_s = inclusion_exclusion(layout.success_pattern, p0)
        p_e = inclusion_exclusion(layout.error_pattern, p0)
    elif method == 'stable':
        phases = _phases_for(layout, inp, quad)
        outputs = propagate(layout.matrix(), input_vectors(layout, inp.magnitudes, phases))
        p_s = float(np.mean(all_click_prob(outputs, layout.success_pattern, det)))
        p_e = float(np.mean(all_click_prob(outputs, layout.error_pattern, det)))
    else:
        raise ValueError(f"Unknown method: {method}")

    return ClickStats(p_s, p_e, Provenance.CLASSICAL, layout.label())
