"""
Detection Layouts - the four named linear-optical layouts

Each layout fixes its transfer matrix, which ports receive light and which
detectors (1-based) must click together for a success or an error event.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Tuple

from scipy.constants import c as SPEED_OF_LIGHT

from modules.network.transfer import (
    TransferMatrix,
    bs_matrix,
    mz_matrix,
    three_mode_matrix,
)
from modules.utils.exceptions import NetworkException
from modules.utils.validator import validate_transmission


class LayoutKind(str, Enum):
    UNBALANCED_BS = 'bs'
    MACH_ZEHNDER = 'mz'
    HOM_EXTENDED = 'hom'
    TWO_COPY_VARIANT = 'twocopy'

    @property
    def copies(self) -> int:
        return 2 if self in (LayoutKind.HOM_EXTENDED, LayoutKind.TWO_COPY_VARIANT) else 1


# HomExtended wiring on top of the printed three-mode matrix: inputs at
# ports 2 and 3 meet at BS1, BS2 splits one BS1 output onto SPAD1/SPAD2 and
# SPAD3 takes the other output.
_HOM_ROWS = (1, 2, 0)
_HOM_COLS = (2, 0, 1)


@dataclass(frozen=True)
class LayoutSpec:
    """One of the four layouts with its beam-splitter settings"""
    kind: LayoutKind
    t1: float
    t2: float = 1.0
    phase: float = 0.0
    input_ports: Tuple[int, ...] = (0,)
    success_pattern: FrozenSet[int] = field(default_factory=lambda: frozenset({1}))
    error_pattern: FrozenSet[int] = field(default_factory=lambda: frozenset({1, 2}))

    def __post_init__(self):
        object.__setattr__(self, 'kind', LayoutKind(self.kind))
        validate_transmission(self.t1)
        validate_transmission(self.t2)
        if not self.success_pattern < self.error_pattern:
            raise NetworkException(
                f"Success pattern {sorted(self.success_pattern)} must be a strict subset "
                f"of error pattern {sorted(self.error_pattern)}"
            )
        if max(self.error_pattern) > self.dim or min(self.error_pattern) < 1:
            raise NetworkException(f"Detector pattern {sorted(self.error_pattern)} outside 1..{self.dim}")
        if any(p < 0 or p >= self.dim for p in self.input_ports):
            raise NetworkException(f"Input ports {self.input_ports} outside 0..{self.dim - 1}")

    @property
    def dim(self) -> int:
        return 2 if self.kind.copies == 1 else 3

    @property
    def copies(self) -> int:
        return self.kind.copies

    @property
    def delta(self) -> float:
        """T1 + T2 - 1, the Mach-Zehnder imbalance"""
        return self.t1 + self.t2 - 1.0

    def matrix(self) -> TransferMatrix:
        if self.kind is LayoutKind.UNBALANCED_BS:
            return bs_matrix(self.t1)
        if self.kind is LayoutKind.MACH_ZEHNDER:
            return mz_matrix(self.t1, self.t2, self.phase)
        if self.kind is LayoutKind.HOM_EXTENDED:
            return three_mode_matrix(self.t1, self.t2).permuted(_HOM_ROWS, _HOM_COLS)
        return three_mode_matrix(self.t1, self.t2)

    def with_phase(self, phase: float) -> 'LayoutSpec':
        return LayoutSpec(self.kind, self.t1, self.t2, phase, self.input_ports,
                          self.success_pattern, self.error_pattern)

    def label(self) -> str:
        if self.kind is LayoutKind.UNBALANCED_BS:
            return f"bs_T{self.t1:g}"
        if self.kind is LayoutKind.MACH_ZEHNDER:
            return f"mz_T1{self.t1:g}_T2{self.t2:g}_phi{self.phase:g}"
        return f"{self.kind.value}_T1{self.t1:g}_T2{self.t2:g}"

    def describe(self) -> dict:
        return {
            'kind': self.kind.value,
            't1': self.t1,
            't2': self.t2,
            'phase': self.phase,
            'input_ports': list(self.input_ports),
            'success_pattern': sorted(self.success_pattern),
            'error_pattern': sorted(self.error_pattern),
        }


def phase_from_path(frequency: float, path_difference: float) -> float:
    """Relative Mach-Zehnder phase 2*pi*omega*d/c"""
    return 2.0 * math.pi * frequency * path_difference / SPEED_OF_LIGHT


def unbalanced_bs(t: float) -> LayoutSpec:
    return LayoutSpec(LayoutKind.UNBALANCED_BS, validate_transmission(t), 1.0, 0.0, (0,),
                      frozenset({1}), frozenset({1, 2}))


def mach_zehnder(t1: float, t2: float, phase: float = 0.0) -> LayoutSpec:
    return LayoutSpec(LayoutKind.MACH_ZEHNDER, t1, t2, phase, (0,),
                      frozenset({1}), frozenset({1, 2}))


def hom_extended(t1: float, t2: float) -> LayoutSpec:
    """v = (0, alpha_1, alpha_2)"""
    return LayoutSpec(LayoutKind.HOM_EXTENDED, t1, t2, 0.0, (1, 2),
                      frozenset({1, 2}), frozenset({1, 2, 3}))


def two_copy_variant(t1: float, t2: float) -> LayoutSpec:
    """v = (alpha_1, alpha_2, 0)"""
    return LayoutSpec(LayoutKind.TWO_COPY_VARIANT, t1, t2, 0.0, (0, 1),
                      frozenset({1, 2}), frozenset({1, 2, 3}))


def build_layout(kind, t=None, t1=None, t2=None, phase=0.0) -> LayoutSpec:
    """Factory used by the CLI: `t` fills whichever transmission is missing"""
    kind = LayoutKind(kind)
    if kind is LayoutKind.UNBALANCED_BS:
        value = t if t is not None else t1
        if value is None:
            raise NetworkException("Unbalanced beam splitter needs a transmission (--t)")
        return unbalanced_bs(value)

    t1 = t1 if t1 is not None else t
    t2 = t2 if t2 is not None else t
    if t1 is None or t2 is None:
        raise NetworkException(f"Layout '{kind.value}' needs --t1 and --t2 (or --t for both)")
    if kind is LayoutKind.MACH_ZEHNDER:
        return mach_zehnder(t1, t2, phase)
    if kind is LayoutKind.HOM_EXTENDED:
        return hom_extended(t1, t2)
    return two_copy_variant(t1, t2)
