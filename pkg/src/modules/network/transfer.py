"""
Transfer Matrices - Beam splitters, Mach-Zehnder and three-mode layouts

Coherent amplitudes propagate as u = A v. Every matrix built here is unitary;
detector inefficiency is handled downstream by the click model.
"""
import os
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '../../')))
import config
from modules.utils.exceptions import DimensionMismatchException, NetworkException
from modules.utils.validator import validate_transmission
from modules.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class TransferMatrix:
    """Complex K x K matrix mapping input to output coherent amplitudes"""
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 1:
            raise DimensionMismatchException(f"Transfer matrix must be square, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise NetworkException("Transfer matrix has non-finite entries")
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def intensities(self) -> np.ndarray:
        """|A_ij|^2: fraction of input port j intensity reaching output i"""
        return np.abs(self.entries) ** 2

    def compose(self, other: 'TransferMatrix') -> 'TransferMatrix':
        """self after other (self . other)"""
        if other.dim != self.dim:
            raise DimensionMismatchException(f"Cannot compose {self.dim}x{self.dim} with {other.dim}x{other.dim}")
        return TransferMatrix(self.entries @ other.entries)

    def permuted(self, row_order: Sequence[int], col_order: Sequence[int]) -> 'TransferMatrix':
        """Relabel output (rows) and input (columns) ports"""
        return TransferMatrix(self.entries[np.ix_(list(row_order), list(col_order))])

    def unitarity_error(self) -> float:
        """Largest per-entry deviation of A^H A from the identity"""
        gram = self.entries.conj().T @ self.entries
        return float(np.max(np.abs(gram - np.eye(self.dim))))

    def is_unitary(self, tol=None) -> bool:
        tol = config.NETWORK_CONFIG['unitarity_tol'] if tol is None else tol
        return self.unitarity_error() <= tol


def _split(t):
    t = validate_transmission(t)
    return np.sqrt(t), np.sqrt(1.0 - t)


def bs_matrix(t: float) -> TransferMatrix:
    """
    Beam splitter [[sqrt(T), sqrt(1-T)], [-sqrt(1-T), sqrt(T)]]

    The reflected amplitude picks up the minus sign on the second row.
    """
    st, sr = _split(t)
    return TransferMatrix(np.array([[st, sr], [-sr, st]], dtype=complex))


def phase_shift(phase: float, dim: int = 2, arm: int = 1) -> TransferMatrix:
    """Diagonal phase exp(i*phase) on one arm (0-based)"""
    if not 0 <= arm < dim:
        raise DimensionMismatchException(f"Arm {arm} outside a {dim}-mode network")
    diag = np.ones(dim, dtype=complex)
    diag[arm] = np.exp(1j * float(phase))
    return TransferMatrix(np.diag(diag))


def mz_matrix(t1: float, t2: float, phase: float = 0.0) -> TransferMatrix:
    """
    Mach-Zehnder transfer bs(t2) . phase(arm 2) . bs(t1), outputs ordered so
    that detector 1 sees T1 R2 + T2 R1 + 2 cos(phi) sqrt(T1 T2 R1 R2) per unit
    intensity entering port 1.

    The printed closed-form matrix of this interferometer is not unitary
    (row norms T1 T2 + R1 R2); the composition reproduces the detector
    intensities of the single-photon interference formula exactly.
    """
    composed = bs_matrix(t2).compose(phase_shift(phase)).compose(bs_matrix(t1))
    # the bright-fringe output is row 2 of the composition
    return composed.permuted([1, 0], [0, 1])


def three_mode_matrix(t1: float, t2: float) -> TransferMatrix:
    """
    Two-copy network: BS1 on modes (1, 2) followed by BS2 on modes (2, 3)

    Rows: (sqrt T1, sqrt R1, 0), (-sqrt(R1 T2), sqrt(T1 T2), sqrt(1-T2)),
    (sqrt(R1 R2), -sqrt(T1 R2), sqrt T2).
    """
    st1, sr1 = _split(t1)
    st2, sr2 = _split(t2)
    return TransferMatrix(np.array([
        [st1, sr1, 0.0],
        [-sr1 * st2, st1 * st2, sr2],
        [sr1 * sr2, -st1 * sr2, st2],
    ], dtype=complex))


def propagate(m: TransferMatrix, v) -> np.ndarray:
    """Output amplitudes u = A v"""
    v = np.asarray(v, dtype=complex)
    if v.shape[-1] != m.dim:
        raise DimensionMismatchException(
            f"Input has {v.shape[-1]} amplitudes but the network has {m.dim} ports"
        )
    # batched inputs along leading axes
    return v @ m.entries.T


def total_intensity(amplitudes) -> float:
    return float(np.sum(np.abs(np.asarray(amplitudes)) ** 2))
