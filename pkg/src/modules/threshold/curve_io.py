"""
Curve persistence - CSV rows for every swept a, boundary rows flagged
"""
import os
import sys
from typing import Dict, Optional

import numpy as np
import pandas as pd

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '../../')))
from modules.network.layouts import LayoutSpec
from modules.threshold.curve import POINT_COLUMNS, ThresholdCurve, upper_concave_hull
from modules.utils.exceptions import CurveValidationException, ConfigurationException
from modules.utils.exporter import ResultExporter
from modules.utils.logger import get_logger

logger = get_logger(__name__)


def curve_frame(curve: ThresholdCurve) -> pd.DataFrame:
    """Boundary rows first (sorted by p_error), then the remaining supporting lines"""
    points = curve.points.copy()
    points['on_boundary'] = True
    extra = curve.lines[~curve.lines['a'].isin(points['a'])].copy()
    if len(extra):
        for col in POINT_COLUMNS:
            if col not in extra:
                extra[col] = np.nan
        extra['on_boundary'] = False
        points = pd.concat([points, extra[POINT_COLUMNS + ['on_boundary']]], ignore_index=True)
    return points[POINT_COLUMNS + ['on_boundary']]


def save_curve(curve: ThresholdCurve, path: str, run_config: Optional[Dict] = None,
               exporter: Optional[ResultExporter] = None) -> str:
    exporter = exporter or ResultExporter()
    diagnostics = dict(curve.meta)
    diagnostics['layout'] = curve.layout.describe()
    diagnostics['boundary_points'] = int(len(curve.points))
    return exporter.export(curve_frame(curve), path, run_config, diagnostics)


def layout_from_dict(data: Dict) -> LayoutSpec:
    try:
        return LayoutSpec(
            data['kind'], float(data['t1']), float(data.get('t2', 1.0)), float(data.get('phase', 0.0)),
            tuple(int(p) for p in data['input_ports']),
            frozenset(int(i) for i in data['success_pattern']),
            frozenset(int(i) for i in data['error_pattern']),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigurationException(f"Invalid layout description {data}: {e}")


def _segment_lines(pe: np.ndarray, ps: np.ndarray) -> pd.DataFrame:
    """Supporting lines through consecutive boundary points"""
    rows = []
    for i in range(len(pe) - 1):
        if pe[i + 1] <= pe[i]:
            continue
        slope = (ps[i + 1] - ps[i]) / (pe[i + 1] - pe[i])
        rows.append({'a': -slope, 'w_max': ps[i] - slope * pe[i]})
    rows.append({'a': 0.0, 'w_max': float(ps[-1])})
    return pd.DataFrame(rows)


def load_curve(path: str, layout: Optional[LayoutSpec] = None, tol: float = 1e-10) -> ThresholdCurve:
    """
    Read a curve CSV (and its sidecar when present), re-validating monotonicity
    and concavity of the boundary rows
    """
    df = ResultExporter.read_csv(path)
    missing = {'p_error', 'p_success_max'} - set(df.columns)
    if missing:
        raise CurveValidationException(f"Curve file {path} lacks columns {sorted(missing)}")

    sidecar = ResultExporter.read_sidecar(path)
    if layout is None:
        described = sidecar.get('diagnostics', {}).get('layout')
        if described is None:
            raise ConfigurationException(f"No layout given and no sidecar next to {path}")
        layout = layout_from_dict(described)

    if 'on_boundary' in df.columns:
        flags = df['on_boundary'].astype(str).str.lower() == 'true'
        points = df[flags].copy()
    else:
        pe = df['p_error'].to_numpy(dtype=float)
        ps = df['p_success_max'].to_numpy(dtype=float)
        points = df.iloc[upper_concave_hull(pe, ps)].copy()
    points = points.sort_values('p_error', kind='mergesort').reset_index(drop=True)
    for col in POINT_COLUMNS:
        if col not in points:
            points[col] = np.nan

    pe = points['p_error'].to_numpy(dtype=float)
    ps = points['p_success_max'].to_numpy(dtype=float)
    if {'a', 'w_max'} <= set(df.columns) and df['a'].notna().all() and df['w_max'].notna().all():
        lines = df[['a', 'w_max']].astype(float).reset_index(drop=True)
    else:
        lines = _segment_lines(pe, ps)

    curve = ThresholdCurve(layout, points[POINT_COLUMNS], lines, sidecar.get('diagnostics', {}))
    curve.validate(tol)
    logger.info(f"Loaded curve {layout.label()} with {len(points)} boundary points from {path}")
    return curve
