"""
Network Module - transfer matrices and detection layouts
"""
from .transfer import TransferMatrix, bs_matrix, mz_matrix, three_mode_matrix, phase_shift, propagate
from .layouts import (
    LayoutKind, LayoutSpec, build_layout, hom_extended, mach_zehnder,
    phase_from_path, two_copy_variant, unbalanced_bs,
)

__all__ = [
    'TransferMatrix', 'bs_matrix', 'mz_matrix', 'three_mode_matrix', 'phase_shift', 'propagate',
    'LayoutKind', 'LayoutSpec', 'build_layout', 'hom_extended', 'mach_zehnder',
    'phase_from_path', 'two_copy_variant', 'unbalanced_bs',
]
