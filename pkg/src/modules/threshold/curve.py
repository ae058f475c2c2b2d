"""
Threshold Curves - boundary of the classical (P_e, P_s) region

Every a < 0 gives one supporting line P_s = W_max(a) - a P_e of the classical
region and one boundary point at the optimal classical input. The boundary is
the upper concave envelope of those points.
"""
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '../../')))
import config
from modules.detection.click_model import DetectorModel
from modules.network.layouts import LayoutSpec
from modules.threshold.witness import WitnessOptimizer, WitnessOptimum, zero_error_limit
from modules.utils.exceptions import InsufficientPointsException, ThresholdException
from modules.utils.logger import get_logger
from modules.utils.validator import validate_curve_shape

logger = get_logger(__name__)

POINT_COLUMNS = ['a', 'p_error', 'p_success_max', 'w_max', 'magnitude_1', 'magnitude_2', 'saturated']


@dataclass
class ThresholdCurve:
    """
    Boundary points (sorted by p_error, concave) plus every supporting line
    (a, w_max) produced by the sweep, kept for the envelope test
    """
    layout: LayoutSpec
    points: pd.DataFrame
    lines: pd.DataFrame
    meta: Dict = field(default_factory=dict)

    @property
    def p_error(self) -> np.ndarray:
        return self.points['p_error'].to_numpy(dtype=float)

    @property
    def p_success(self) -> np.ndarray:
        return self.points['p_success_max'].to_numpy(dtype=float)

    @property
    def a_values(self) -> np.ndarray:
        return self.points['a'].to_numpy(dtype=float)

    @property
    def support(self) -> Tuple[float, float]:
        pe = self.p_error
        positive = pe[pe > 0]
        if len(positive) == 0:
            return 0.0, 0.0
        return float(positive.min()), float(pe.max())

    @property
    def zero_limit(self) -> float:
        """Classical P_s bound at P_e = 0 (0 unless the layout factorizes)"""
        value = self.meta.get('zero_error_limit')
        if value is None:
            value = zero_error_limit(self.layout)
            self.meta['zero_error_limit'] = value
        return float(value)

    def envelope(self, p_error: float) -> Tuple[float, float]:
        """min over stored lines of W_max(a) - a P_e, with the minimising a"""
        if p_error <= 0.0:
            return self.zero_limit, -math.inf
        a = self.lines['a'].to_numpy(dtype=float)
        w = self.lines['w_max'].to_numpy(dtype=float)
        values = w - a * p_error
        k = int(np.argmin(values))
        return float(values[k]), float(a[k])

    def bound(self, p_error: float) -> Tuple[float, float, bool]:
        """
        Classical P_s bound at P_e with the minimising a, and whether P_e lies
        below the curve support. There the stored lines only give a loose bound,
        so the low-end power law takes over, never below the P_e = 0 limit.
        """
        value, best_a = self.envelope(p_error)
        lo, _ = self.support
        if p_error <= 0.0:
            return value, best_a, True
        if p_error < lo:
            extrapolated = self.interpolate(p_error)
            if math.isfinite(extrapolated):
                value = max(self.zero_limit, min(value, extrapolated))
            return value, best_a, True
        return value, best_a, False

    def interpolate(self, p_error: float) -> float:
        """Monotone piecewise-linear interpolation in log-log coordinates"""
        pe, ps = self.p_error, self.p_success
        mask = (pe > 0) & (ps > 0)
        if mask.sum() < 2 or p_error <= 0:
            return float('nan')
        x, y = np.log(pe[mask]), np.log(ps[mask])
        lx = math.log(p_error)
        if lx < x[0] or lx > x[-1]:
            # linear extrapolation from the end segment
            i = 0 if lx < x[0] else len(x) - 2
            slope = (y[i + 1] - y[i]) / (x[i + 1] - x[i]) if x[i + 1] > x[i] else 0.0
            return float(math.exp(y[i] + slope * (lx - x[i])))
        return float(math.exp(np.interp(lx, x, y)))

    def validate(self, tol: float = 1e-10) -> bool:
        return validate_curve_shape(self.p_error, self.p_success, tol)


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    prefactor: float
    window: Tuple[float, float]
    residual: float
    n_points: int
    valid: bool = True


def default_a_values() -> np.ndarray:
    opts = config.SWEEP_CONFIG
    return -np.geomspace(opts['a_min'], opts['a_max'], opts['a_points'])


def upper_concave_hull(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """
    Indices of the nondecreasing upper concave envelope of (x, y), in
    increasing x; duplicate x keep the highest y
    """
    order = np.lexsort((-y, x))
    hull = []
    last_x = None
    best_y = -np.inf
    for i in order:
        if x[i] == last_x or y[i] < best_y:
            continue
        last_x = x[i]
        best_y = y[i]
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            cross = (x[i1] - x[i0]) * (y[i] - y[i0]) - (y[i1] - y[i0]) * (x[i] - x[i0])
            if cross > 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.array(hull, dtype=int)


def _optimize_all(optimizer: WitnessOptimizer, a_values: np.ndarray, parallel: bool,
                  max_workers: int) -> Dict[int, WitnessOptimum]:
    results = {}
    if not parallel or len(a_values) < 2:
        for i, a in enumerate(a_values):
            results[i] = optimizer.maximize(a)
        return results

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        future_to_index = {executor.submit(optimizer.maximize, a): i for i, a in enumerate(a_values)}
        for future in as_completed(future_to_index):
            i = future_to_index[future]
            try:
                results[i] = future.result()
            except Exception as e:
                logger.error(f"Witness maximisation failed at a={a_values[i]:.3e}: {e}")
                for pending in future_to_index:
                    pending.cancel()
                raise
    return results


def threshold_curve(layout: LayoutSpec, a_values: Optional[Sequence[float]] = None,
                    det: Optional[DetectorModel] = None, quad: Optional[int] = None,
                    parallel: Optional[bool] = None, max_workers: Optional[int] = None,
                    strict_bounds: Optional[bool] = None) -> ThresholdCurve:
    """Sweep a, maximise the witness at each value and keep the concave boundary"""
    opts = config.SWEEP_CONFIG
    a_values = default_a_values() if a_values is None else np.asarray(a_values, dtype=float)
    if a_values.ndim != 1 or len(a_values) < opts['min_points']:
        raise ThresholdException(
            f"a sweep needs at least {opts['min_points']} values, got {a_values.size}"
        )
    if np.any(~np.isfinite(a_values)) or np.any(a_values >= 0):
        raise ThresholdException("a sweep values must be finite and negative")
    if np.abs(a_values).min() > opts['a_min'] or np.abs(a_values).max() < opts['a_max']:
        logger.warning(
            f"a sweep |a| in [{np.abs(a_values).min():.2e}, {np.abs(a_values).max():.2e}] "
            f"is narrower than [{opts['a_min']:.0e}, {opts['a_max']:.0e}]"
        )

    parallel = opts['parallel'] if parallel is None else parallel
    max_workers = max_workers or opts['max_workers']
    optimizer = WitnessOptimizer(layout, det, quad, strict_bounds)

    logger.info(f"Threshold curve for {layout.label()}: {len(a_values)} values of a")
    results = _optimize_all(optimizer, a_values, parallel, max_workers)

    rows = []
    for i in sorted(results):
        opt = results[i]
        mags = list(opt.magnitudes) + [0.0] * (2 - len(opt.magnitudes))
        rows.append([opt.a, opt.p_error, opt.p_success, opt.w_max, mags[0], mags[1], opt.saturated])
    lines = pd.DataFrame(rows, columns=POINT_COLUMNS)

    keep = upper_concave_hull(lines['p_error'].to_numpy(dtype=float),
                              lines['p_success_max'].to_numpy(dtype=float))
    points = lines.iloc[keep].reset_index(drop=True)
    dropped = len(lines) - len(points)
    if dropped:
        logger.debug(f"{dropped} dominated or duplicate points discarded")

    meta = {
        'a_min': float(np.abs(a_values).min()),
        'a_max': float(np.abs(a_values).max()),
        'a_points': int(len(a_values)),
        'saturated_points': int(lines['saturated'].sum()),
        'quad_nodes': quad or config.QUADRATURE_CONFIG['nodes'],
        'zero_error_limit': zero_error_limit(layout, det),
    }
    curve = ThresholdCurve(layout, points, lines, meta)
    logger.info(f"Curve {layout.label()}: {len(points)} boundary points, support {curve.support}")
    return curve


def power_law_fit(curve: ThresholdCurve, window: Optional[Tuple[float, float]] = None) -> PowerLawFit:
    """Least-squares line log P_s = log f + k log P_e inside a P_e window"""
    opts = config.FIT_CONFIG
    window = tuple(window or opts['window'])
    if window[0] <= 0 or window[1] <= window[0]:
        raise ThresholdException(f"Invalid fit window {window}")

    pe, ps = curve.p_error, curve.p_success
    mask = (pe >= window[0]) & (pe <= window[1]) & (ps > 0)
    n = int(mask.sum())
    if n < opts['min_points']:
        raise InsufficientPointsException(
            f"{n} curve points in window [{window[0]:.1e}, {window[1]:.1e}], "
            f"need {opts['min_points']}"
        )

    x, y = np.log10(pe[mask]), np.log10(ps[mask])
    slope, intercept = np.polyfit(x, y, 1)
    predicted = 10.0 ** (intercept + slope * x)
    residual = float(np.max(np.abs(predicted / ps[mask] - 1.0)))
    valid = residual < opts['max_residual']
    if not valid:
        logger.warning(f"Power-law fit residual {residual:.3e} above {opts['max_residual']}")
    return PowerLawFit(float(slope), float(10.0 ** intercept), window, residual, n, valid)


def fixed_exponent_prefactor(curve: ThresholdCurve, exponent: float,
                             window: Optional[Tuple[float, float]] = None) -> float:
    """f of P_s = f P_e^k with k given, geometric mean of P_s / P_e^k over the window"""
    opts = config.FIT_CONFIG
    window = tuple(window or opts['window'])
    pe, ps = curve.p_error, curve.p_success
    mask = (pe >= window[0]) & (pe <= window[1]) & (ps > 0)
    if int(mask.sum()) < opts['min_points']:
        raise InsufficientPointsException(
            f"{int(mask.sum())} curve points in window [{window[0]:.1e}, {window[1]:.1e}], "
            f"need {opts['min_points']}"
        )
    return float(np.exp(np.mean(np.log(ps[mask]) - exponent * np.log(pe[mask]))))
