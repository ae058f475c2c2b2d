"""
Witness Optimizer - classical maximum of W_a = P_s + a P_e

Linearity of W_a reduces the classical optimum to coherent inputs: one
magnitude for single-input layouts, a phase-randomized pair for the two-copy
layouts. Search is a log-spaced magnitude grid (plus vacuum) followed by
bounded Brent refinement in log-magnitude, coordinate-wise for pairs. No
randomness anywhere, so identical settings give identical optima.

The magnitude cap starts at a layout-dependent value (weak couplings need
bright inputs) and grows while the optimum sits on it. A supremum reached
only at infinite intensity is accepted once W stops changing between caps.
"""
import math
import os
import sys
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '../../')))
import config
from modules.detection.click_model import ClassicalInput, DetectorModel, pattern_probabilities
from modules.network.layouts import LayoutKind, LayoutSpec
from modules.utils.exceptions import SolverBoundException, ThresholdException
from modules.utils.logger import get_logger

logger = get_logger(__name__)

# P_s this close to 1 at the cap is the saturated corner of the curve
_SATURATION = 1e-9
_GRID_BLOCK = 16
# couplings below this count as no light at all
_COUPLING_TOL = 1e-12


@dataclass(frozen=True)
class WitnessOptimum:
    a: float
    w_max: float
    magnitudes: Tuple[float, ...]
    p_success: float
    p_error: float
    at_cap: bool = False
    limit: bool = False
    cap: float = math.inf

    @property
    def saturated(self) -> bool:
        """Cap optimum accepted as the supremum"""
        return self.at_cap and (self.limit or self.p_success >= 1.0 - _SATURATION)

    @property
    def optimal_input(self) -> ClassicalInput:
        return ClassicalInput(self.magnitudes, phase_randomized=True)


def input_couplings(layout: LayoutSpec, det: Optional[DetectorModel] = None) -> np.ndarray:
    """nu_i |A_ij|^2 from each input port j to each detector i"""
    det = DetectorModel.ideal(layout.dim) if det is None else det
    intensities = layout.matrix().intensities[:, list(layout.input_ports)]
    return det.nu[:, None] * intensities


def zero_error_limit(layout: LayoutSpec, det: Optional[DetectorModel] = None) -> float:
    """
    Largest classical P_s with P_e = 0, the a -> -inf limit of W_max(a).

    P_e vanishes only when some error detector receives no light, i.e. every
    input coupled to it is dark. The other inputs can then be made arbitrarily
    bright, so the limit is 1 when they reach every success detector, else 0.
    """
    lit = input_couplings(layout, det) > _COUPLING_TOL
    success = [i - 1 for i in sorted(layout.success_pattern)]
    for i in sorted(layout.error_pattern - layout.success_pattern):
        free = ~lit[i - 1]
        if all(np.any(lit[s] & free) for s in success):
            return 1.0
    return 0.0


class WitnessOptimizer:
    """
    Maximises W_a over classical inputs of one layout
    """

    def __init__(self, layout: LayoutSpec, det: Optional[DetectorModel] = None,
                 quad: Optional[int] = None, strict_bounds: Optional[bool] = None):
        self.layout = layout
        self.det = DetectorModel.ideal(layout.dim) if det is None else det
        self.quad = quad
        opts = config.OPTIMIZER_CONFIG
        self.floor = opts['magnitude_floor']
        self.points_per_decade = (opts['grid_points'] - 1) / math.log10(opts['magnitude_cap'] / self.floor)
        self.cap = opts['magnitude_cap'] * self._coupling_scale()
        self.max_cap = self.cap * opts['max_cap_factor']
        self.cap_growth = opts['cap_growth']
        self.limit_tol = opts['limit_tol']
        self.grid = self._grid(self.cap)
        self.xatol = opts['xatol']
        self.cap_margin = opts['cap_margin']
        self.tie_tol = opts['tie_tol']
        self.sweeps = opts['coordinate_sweeps']
        self.strict_bounds = opts['strict_bounds'] if strict_bounds is None else strict_bounds
        self.n_inputs = len(layout.input_ports)

    def _coupling_scale(self) -> float:
        """1/sqrt of the weakest nonzero coupling into a pattern detector"""
        detectors = [i - 1 for i in sorted(self.layout.error_pattern)]
        couplings = input_couplings(self.layout, self.det)[detectors]
        positive = couplings[couplings > _COUPLING_TOL]
        if len(positive) == 0:
            return 1.0
        return max(1.0, 1.0 / math.sqrt(float(positive.min())))

    def _grid(self, cap: float) -> np.ndarray:
        n = int(round(math.log10(cap / self.floor) * self.points_per_decade)) + 1
        return np.concatenate([[0.0], np.geomspace(self.floor, cap, n)])

    # -- objective -------------------------------------------------------
    def probabilities(self, magnitudes) -> Tuple[np.ndarray, np.ndarray]:
        return pattern_probabilities(self.layout, magnitudes, self.det, self.quad, phase_randomized=True)

    def witness(self, magnitudes, a: float) -> np.ndarray:
        p_s, p_e = self.probabilities(magnitudes)
        return p_s + a * p_e

    # -- search ----------------------------------------------------------
    def _grid_values(self, grid: np.ndarray, a: float) -> np.ndarray:
        if self.n_inputs == 1:
            return self.witness(grid[:, None], a)
        values = np.empty((len(grid), len(grid)))
        for start in range(0, len(grid), _GRID_BLOCK):
            rows = grid[start:start + _GRID_BLOCK]
            mags = np.stack(np.meshgrid(rows, grid, indexing='ij'), axis=-1)
            values[start:start + _GRID_BLOCK] = self.witness(mags, a)
        return values

    def _pick(self, grid: np.ndarray, values: np.ndarray) -> Tuple[int, ...]:
        """Best grid cell; ties within tie_tol go to the smallest total magnitude"""
        best = values.max()
        candidates = np.argwhere(values >= best - self.tie_tol)
        sizes = [sum(grid[i] ** 2 for i in idx) for idx in candidates]
        return tuple(int(i) for i in candidates[int(np.argmin(sizes))])

    @staticmethod
    def _bracket(grid: np.ndarray, k: int) -> Tuple[float, float]:
        lo = grid[max(k - 1, 1)]
        hi = grid[min(k + 1, len(grid) - 1)]
        return math.log(lo), math.log(hi)

    def _refine_coordinate(self, mags: np.ndarray, axis: int, a: float,
                           bounds: Tuple[float, float]) -> np.ndarray:
        def negative(log_m):
            trial = mags.copy()
            trial[axis] = math.exp(log_m)
            return -float(self.witness(trial, a))

        res = minimize_scalar(negative, bounds=bounds, method='bounded', options={'xatol': self.xatol})
        if -res.fun > float(self.witness(mags, a)):
            mags = mags.copy()
            mags[axis] = math.exp(res.x)
        return mags

    def _search(self, a: float, cap: float) -> WitnessOptimum:
        """Grid plus refinement with every magnitude in [0, cap]"""
        grid = self._grid(cap)
        values = self._grid_values(grid, a)
        cell = self._pick(grid, values)
        mags = np.array([grid[k] for k in cell], dtype=float)
        logger.debug(f"a={a:.3e}, cap={cap:.3g}: grid optimum {mags} W={values[cell]:.6e}")

        active = [ax for ax, k in enumerate(cell) if k > 0]
        brackets = {ax: self._bracket(grid, cell[ax]) for ax in active}
        step = math.log(grid[2] / grid[1])
        sweeps = 1 if len(active) <= 1 else self.sweeps
        for _ in range(sweeps):
            before = float(self.witness(mags, a))
            for ax in active:
                mags = self._refine_coordinate(mags, ax, a, brackets[ax])
                # later sweeps search around the current point
                centre = math.log(mags[ax])
                brackets[ax] = (max(centre - step, math.log(grid[1])), min(centre + step, math.log(cap)))
            if float(self.witness(mags, a)) - before <= self.tie_tol * 1e-3:
                break

        p_s, p_e = self.probabilities(mags)
        p_s, p_e = float(p_s), float(p_e)
        at_cap = bool(np.any(cap - mags < self.cap_margin * cap))
        return WitnessOptimum(a, p_s + a * p_e, tuple(float(m) for m in mags), p_s, p_e, at_cap, cap=cap)

    def maximize(self, a: float) -> WitnessOptimum:
        a = float(a)
        if not math.isfinite(a) or a > 0:
            raise ThresholdException(f"Witness parameter must be finite and <= 0, got {a}")

        cap = self.cap
        previous = None
        while True:
            optimum = self._search(a, cap)
            if not optimum.at_cap or optimum.saturated:
                break
            if previous is not None and abs(optimum.w_max - previous.w_max) <= self.limit_tol:
                optimum = replace(optimum, limit=True)
                logger.debug(f"a={a:.3e}: W converged to its limit {optimum.w_max:.12f} at cap {cap:.3g}")
                break
            if cap * self.cap_growth > self.max_cap * (1.0 + 1e-12):
                message = (f"Witness optimum on the magnitude cap {cap:.4g} for "
                           f"{self.layout.label()} at a={a:.3e} (P_s={optimum.p_success:.6f})")
                if self.strict_bounds:
                    logger.error(message)
                    raise SolverBoundException(message, a=a, magnitudes=optimum.magnitudes)
                logger.warning(message)
                return optimum
            previous = optimum
            cap *= self.cap_growth

        if optimum.saturated:
            logger.debug(f"a={a:.3e}: saturated optimum at the cap {cap:.3g}")
        return optimum


def maximize_witness(layout: LayoutSpec, a: float, det: Optional[DetectorModel] = None,
                     quad: Optional[int] = None, strict_bounds: Optional[bool] = None) -> WitnessOptimum:
    """W_max(a) and the optimal classical input for one layout"""
    return WitnessOptimizer(layout, det, quad, strict_bounds).maximize(a)


def mz_phase_scan(layout: LayoutSpec, a: float, phases: Sequence[float],
                  det: Optional[DetectorModel] = None) -> pd.DataFrame:
    """W_max(a) of a Mach-Zehnder for every internal phase of a grid"""
    if layout.kind is not LayoutKind.MACH_ZEHNDER:
        raise ThresholdException(f"Phase scan needs a Mach-Zehnder layout, got '{layout.kind.value}'")
    rows = []
    for phase in phases:
        opt = maximize_witness(layout.with_phase(float(phase)), a, det, strict_bounds=False)
        rows.append({'phase': float(phase), 'w_max': opt.w_max, 'magnitude': opt.magnitudes[0]})
    return pd.DataFrame(rows)
