"""
Nonclassicality Classifier - compare click statistics with a threshold curve
"""
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '../../')))
import config
from modules.detection.click_model import ClickStats, DetectorModel
from modules.network.layouts import LayoutSpec
from modules.source.source_model import SourceParams, source_click_stats
from modules.threshold.curve import ThresholdCurve, threshold_curve
from modules.utils.exceptions import NoFlipFoundException, ThresholdException
from modules.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class Verdict:
    nonclassical: bool
    margin: float
    threshold: float
    interpolated_threshold: float
    best_a: float
    low_confidence: bool
    p_success: float
    p_error: float

    @property
    def confidence(self) -> str:
        return 'low' if self.low_confidence else 'normal'

    def as_dict(self) -> dict:
        return {
            'nonclassical': self.nonclassical,
            'margin': self.margin,
            'threshold': self.threshold,
            'interpolated_threshold': self.interpolated_threshold,
            'best_a': self.best_a,
            'confidence': self.confidence,
            'p_success': self.p_success,
            'p_error': self.p_error,
        }


@dataclass(frozen=True)
class CriticalRatio:
    ratio: float
    eta: float
    nbar: float
    iterations: int


def witness_value(stats: ClickStats, a: float) -> float:
    return stats.witness(a)


def witness_violation(stats: ClickStats, curve: ThresholdCurve) -> float:
    """max over stored a of W_a(stats) - W_max(a); positive means nonclassical"""
    a = curve.lines['a'].to_numpy(dtype=float)
    w = curve.lines['w_max'].to_numpy(dtype=float)
    return float(np.max(stats.p_success + a * stats.p_error - w))


def is_nonclassical(stats: ClickStats, curve: ThresholdCurve) -> Verdict:
    """
    Nonclassical when P_s lies above the envelope of supporting lines at P_e.
    Points outside the curve support are still decided but flagged.
    """
    if stats.layout_label is not None and stats.layout_label != curve.layout.label():
        raise ThresholdException(
            f"Statistics of {stats.layout_label} cannot be judged against a {curve.layout.label()} curve"
        )
    opts = config.CLASSIFY_CONFIG
    threshold, best_a, below_support = curve.bound(stats.p_error)
    margin = stats.p_success - threshold
    slack = max(opts['margin_tol'], opts['relative_tol'] * abs(threshold))

    lo, hi = curve.support
    low_confidence = below_support or stats.p_error > hi
    if low_confidence:
        logger.debug(f"P_e={stats.p_error:.3e} outside curve support [{lo:.3e}, {hi:.3e}]")

    return Verdict(
        nonclassical=bool(margin > slack),
        margin=float(margin),
        threshold=float(threshold),
        interpolated_threshold=curve.interpolate(stats.p_error),
        best_a=best_a,
        low_confidence=bool(low_confidence),
        p_success=stats.p_success,
        p_error=stats.p_error,
    )


def critical_noise_ratio(layout: LayoutSpec, p: SourceParams, det: Optional[DetectorModel] = None,
                         curve: Optional[ThresholdCurve] = None, eta: Optional[float] = None) -> CriticalRatio:
    """
    Bisect log(nbar) at fixed eta until the verdict flips; returns eta/nbar
    at the flip. Coherence and indistinguishability come from `p`.
    """
    opts = config.CRITICAL_RATIO_CONFIG
    eta = opts['eta'] if eta is None else float(eta)
    if curve is None:
        curve = threshold_curve(layout, det=det)

    def verdict(nbar: float) -> bool:
        stats = source_click_stats(p.replace(eta=eta, nbar=nbar), layout, det)
        return is_nonclassical(stats, curve).nonclassical

    lo = math.log(eta / opts['ratio_max'])
    hi = math.log(eta / opts['ratio_min'])
    v_lo, v_hi = verdict(math.exp(lo)), verdict(math.exp(hi))
    if v_lo == v_hi:
        raise NoFlipFoundException(
            f"Verdict does not flip for eta/nbar in [{opts['ratio_min']:g}, {opts['ratio_max']:g}] "
            f"on {layout.label()} (nonclassical={v_lo})"
        )

    iterations = 0
    while hi - lo > math.log1p(opts['rel_tol']) and iterations < opts['max_iter']:
        mid = 0.5 * (lo + hi)
        if verdict(math.exp(mid)) == v_lo:
            lo = mid
        else:
            hi = mid
        iterations += 1

    nbar = math.exp(0.5 * (lo + hi))
    logger.info(f"Critical eta/nbar on {layout.label()}: {eta / nbar:.4g} after {iterations} steps")
    return CriticalRatio(eta / nbar, eta, nbar, iterations)


def ratio_difference(r1: float, r2: float, mode: Optional[str] = None) -> float:
    """Difference of two critical ratios, absolute or in decades"""
    mode = mode or config.CRITICAL_RATIO_CONFIG['difference_mode']
    if mode == 'absolute':
        return r1 - r2
    if mode == 'log10':
        if r1 <= 0 or r2 <= 0:
            raise ThresholdException("log10 ratio difference needs positive ratios")
        return math.log10(r1) - math.log10(r2)
    raise ThresholdException(f"Unknown ratio difference mode '{mode}'")
