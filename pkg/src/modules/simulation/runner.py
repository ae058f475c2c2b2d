"""
Experiment Runner - the work behind each CLI subcommand
"""
import math
import os
import sys
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '../../')))
import config
from modules.detection.click_model import ClickStats, DetectorModel, Provenance
from modules.network.layouts import LayoutKind, LayoutSpec, build_layout, mach_zehnder, two_copy_variant
from modules.source.source_model import (
    SourceParams, mz_model_threshold, mz_prefactor, source_click_stats, two_copy_tolerant_threshold,
)
from modules.threshold.classifier import CriticalRatio, critical_noise_ratio, is_nonclassical, ratio_difference
from modules.threshold.curve import (
    PowerLawFit, ThresholdCurve, fixed_exponent_prefactor, power_law_fit, threshold_curve,
)
from modules.threshold.curve_io import curve_frame, load_curve, save_curve
from modules.utils.exceptions import ConfigurationException, InsufficientPointsException, NoFlipFoundException
from modules.utils.exporter import ResultExporter
from modules.utils.logger import get_logger
from modules.utils.run_config import RunConfig

logger = get_logger(__name__)

FIGURES = tuple(config.FIGURE_PRESETS)
# small-P_e exponent of the two-copy boundary
TWO_COPY_EXPONENT = 2.0 / 3.0


class ExperimentRunner:
    def __init__(self, cfg: RunConfig, exporter: Optional[ResultExporter] = None):
        self.cfg = cfg
        self.exporter = exporter or ResultExporter()

    # -- building blocks -------------------------------------------------
    def layout(self) -> LayoutSpec:
        c = self.cfg
        return build_layout(c.layout, c.t, c.t1, c.t2, c.phase)

    def source(self) -> SourceParams:
        c = self.cfg
        return SourceParams(c.eta, c.nbar, c.coherence, c.noise_coherence, c.indist)

    def a_values(self) -> np.ndarray:
        return -np.geomspace(self.cfg.a_min, self.cfg.a_max, self.cfg.a_points)

    def detector(self, layout: LayoutSpec) -> DetectorModel:
        return DetectorModel.ideal(layout.dim)

    def compute_curve(self, layout: LayoutSpec) -> ThresholdCurve:
        return threshold_curve(layout, self.a_values(), self.detector(layout), self.cfg.quad_nodes,
                               max_workers=self.cfg.workers)

    def curve_for(self, layout: LayoutSpec) -> ThresholdCurve:
        """Stored curve when --curve is given, otherwise a fresh sweep"""
        if self.cfg.curve:
            return load_curve(self.cfg.curve, layout)
        return self.compute_curve(layout)

    def output_path(self, default_name: str) -> str:
        return self.cfg.out or os.path.join(config.OUTPUT_DIR, default_name)

    def sweep_values(self) -> np.ndarray:
        c = self.cfg
        if c.sweep_min <= 0:
            return np.linspace(0.0, c.sweep_max, c.sweep_points)
        return np.geomspace(c.sweep_min, c.sweep_max, c.sweep_points)

    # -- subcommands -----------------------------------------------------
    def run_threshold(self) -> str:
        layout = self.layout()
        curve = self.compute_curve(layout)
        path = self.output_path(f"curve_{layout.label()}.csv")
        save_curve(curve, path, self.cfg.to_dict(), self.exporter)
        return path

    def run_simulate(self) -> pd.DataFrame:
        layout = self.layout()
        curve = self.curve_for(layout)
        base = self.source()
        det = self.detector(layout)

        rows = []
        for value in self.sweep_values():
            p = base.replace(**{self.cfg.sweep: float(value)})
            stats = source_click_stats(p, layout, det)
            verdict = is_nonclassical(stats, curve)
            rows.append({
                'eta': p.eta, 'nbar': p.nbar,
                'p_success': stats.p_success, 'p_error': stats.p_error,
                'nonclassical': verdict.nonclassical, 'margin': verdict.margin,
                'threshold': verdict.threshold, 'confidence': verdict.confidence,
            })
        df = pd.DataFrame(rows)
        flips = int((df['nonclassical'].astype(int).diff().abs() > 0).sum())
        path = self.output_path(f"simulate_{layout.label()}_{self.cfg.sweep}.csv")
        self.exporter.export(df, path, self.cfg.to_dict(),
                             {'layout': layout.describe(), 'verdict_flips': flips})
        return df

    def run_fit(self) -> PowerLawFit:
        if not self.cfg.curve:
            raise ConfigurationException("fit needs a curve file (--curve)")
        curve = load_curve(self.cfg.curve)
        return power_law_fit(curve, self.cfg.window)

    def run_classify(self) -> pd.DataFrame:
        if not self.cfg.curve or not self.cfg.stats:
            raise ConfigurationException("classify needs --curve and --stats files")
        curve = load_curve(self.cfg.curve)
        table = self.exporter.read_csv(self.cfg.stats)
        missing = {'p_success', 'p_error'} - set(table.columns)
        if missing:
            raise ConfigurationException(f"Stats file lacks columns {sorted(missing)}")

        rows = []
        for ps, pe in zip(table['p_success'].astype(float), table['p_error'].astype(float)):
            verdict = is_nonclassical(ClickStats(ps, pe, Provenance.INGESTED), curve)
            rows.append(verdict.as_dict())
        df = pd.DataFrame(rows)
        stem = os.path.splitext(os.path.basename(self.cfg.stats))[0]
        path = self.output_path(f"{stem}_verdicts.csv")
        self.exporter.export(df, path, self.cfg.to_dict(), {'layout': curve.layout.describe(),
                                                            'provenance': Provenance.INGESTED.value})
        return df

    # -- figure data -----------------------------------------------------
    def _critical(self, layout: LayoutSpec, p: SourceParams, curve: ThresholdCurve,
                  eta: Optional[float] = None) -> Optional[CriticalRatio]:
        try:
            return critical_noise_ratio(layout, p, self.detector(layout), curve, eta)
        except NoFlipFoundException as e:
            logger.warning(f"{layout.label()}: {e}")
            return None

    @staticmethod
    def _figure_settings(preset: Dict) -> Tuple[str, List[float], List[LayoutSpec]]:
        if preset['layout'] == 'mz':
            values = list(preset['t2_values'])
            return 't2', values, [mach_zehnder(preset['t1'], t2) for t2 in values]
        values = list(preset['t_values'])
        return 't', values, [two_copy_variant(t, t) for t in values]

    @staticmethod
    def _figure_variants(preset: Dict) -> List[Tuple[str, Dict]]:
        """(label, source overrides) of each plotted family, in output order"""
        if preset['layout'] == 'mz':
            variants = [('coherent', {'signal_coherence': 1.0}),
                        ('polychromatic', {'signal_coherence': 0.0})]
            chosen = preset.get('signal_coherence')
            key = 'signal_coherence'
        else:
            variants = [('indistinguishable', {'indistinguishability': 1.0}),
                        ('distinguishable', {'indistinguishability': 0.0})]
            chosen = preset.get('indistinguishability')
            key = 'indistinguishability'
        if chosen is None:
            return variants
        return [(label, overrides) for label, overrides in variants if overrides[key] == chosen]

    @staticmethod
    def _linear_ratio(layout: LayoutSpec, label: str) -> float:
        if layout.kind is LayoutKind.MACH_ZEHNDER:
            return mz_model_threshold(layout.t1, layout.t2, label == 'polychromatic')
        return two_copy_tolerant_threshold(layout.t1)

    def _curve_family(self, layouts: List[LayoutSpec], key: str, values: List[float]) -> Dict:
        """Exact boundary of every setting plus its small-P_e power law"""
        curves, frames = {}, []
        for layout, value in zip(layouts, values):
            curve = self.compute_curve(layout)
            curves[value] = curve
            frame = curve_frame(curve)
            frame = frame[frame['on_boundary']].drop(columns='on_boundary')
            frame.insert(0, key, value)
            frame.insert(1, 'kind', 'exact')
            frames.append(frame)

            linear = frame[['a', 'p_error']].copy()
            if layout.kind is LayoutKind.MACH_ZEHNDER:
                exponent, prefactor = 0.5, mz_prefactor(layout.t1, layout.delta)
            else:
                exponent = TWO_COPY_EXPONENT
                try:
                    prefactor = fixed_exponent_prefactor(curve, exponent)
                except InsufficientPointsException as e:
                    logger.warning(f"{layout.label()}: no linear family, {e}")
                    continue
            linear['p_success_max'] = prefactor * linear['p_error'] ** exponent
            linear.insert(0, key, value)
            linear.insert(1, 'kind', 'linear')
            frames.append(linear)
        return {'curves': curves, 'frame': pd.concat(frames, ignore_index=True)}

    def _threshold_family(self, layouts: List[LayoutSpec], key: str, values: List[float],
                          curves: Dict, variants: List[Tuple[str, Dict]]) -> pd.DataFrame:
        """Critical nbar against eta: exact bisection and the linear law"""
        opts = config.FIGURE_SWEEP_CONFIG
        etas = np.geomspace(opts['eta_min'], opts['eta_max'], opts['eta_points'])
        rows = []
        for layout, value in zip(layouts, values):
            for label, overrides in variants:
                p = SourceParams(float(etas[0]), 0.0).replace(**overrides)
                linear_ratio = self._linear_ratio(layout, label)
                for eta in etas:
                    result = self._critical(layout, p, curves[value], float(eta))
                    rows.append({
                        key: value,
                        'variant': label,
                        'eta': float(eta),
                        'nbar_exact': result.nbar if result else float('nan'),
                        'nbar_linear': float(eta) / linear_ratio if linear_ratio > 0 else float('inf'),
                    })
        return pd.DataFrame(rows)

    def _ratio_rows(self, layouts: List[LayoutSpec], key: str, values: List[float],
                    curves: Dict, variants: List[Tuple[str, Dict]]) -> pd.DataFrame:
        """Critical eta/nbar at the reference eta, per setting and variant"""
        base = SourceParams(config.CRITICAL_RATIO_CONFIG['eta'], 0.0)
        rows = []
        for layout, value in zip(layouts, values):
            row = {key: value}
            if layout.kind is LayoutKind.MACH_ZEHNDER:
                row['delta'] = layout.delta
            ratios = []
            for label, overrides in variants:
                result = self._critical(layout, base.replace(**overrides), curves[value])
                ratio = result.ratio if result else float('nan')
                ratios.append(ratio)
                row[f'critical_ratio_{label}'] = ratio
                row[f'linear_ratio_{label}'] = self._linear_ratio(layout, label)
            if len(ratios) == 2:
                # stricter variant second: polychromatic / distinguishable
                r_loose, r_strict = ratios
                row['ratio_difference'] = (ratio_difference(r_strict, r_loose)
                                           if not (math.isnan(r_loose) or math.isnan(r_strict))
                                           else float('nan'))
            rows.append(row)
        return pd.DataFrame(rows)

    def run_reproduce(self, figure: str) -> List[str]:
        if figure not in config.FIGURE_PRESETS:
            raise ConfigurationException(f"Unknown figure '{figure}', choose from {FIGURES}")
        preset = config.FIGURE_PRESETS[figure]
        out_dir = self.cfg.out or config.OUTPUT_DIR
        os.makedirs(out_dir, exist_ok=True)
        echo = dict(self.cfg.to_dict(), figure=figure, preset=preset,
                    eta_sweep=config.FIGURE_SWEEP_CONFIG)

        key, values, layouts = self._figure_settings(preset)
        variants = self._figure_variants(preset)
        family = self._curve_family(layouts, key, values)
        thresholds = self._threshold_family(layouts, key, values, family['curves'], variants)
        ratios = self._ratio_rows(layouts, key, values, family['curves'], variants)

        paths = {
            'curves': os.path.join(out_dir, f"{figure}_curves.csv"),
            'thresholds': os.path.join(out_dir, f"{figure}_thresholds.csv"),
            'ratios': os.path.join(out_dir, f"{figure}_ratios.csv"),
        }
        self.exporter.export(family['frame'], paths['curves'], echo, {'curves': len(family['curves'])})
        self.exporter.export(thresholds, paths['thresholds'], echo,
                             {'variants': [label for label, _ in variants]})
        self.exporter.export(ratios, paths['ratios'], echo,
                             {'difference_mode': config.CRITICAL_RATIO_CONFIG['difference_mode']})
        written = list(paths.values())
        logger.info(f"{figure}: wrote {', '.join(written)}")
        return written
