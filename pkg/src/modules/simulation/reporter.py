"""
Run Reporter - terminal summaries of curves, fits, verdicts and figure data
"""
import pandas as pd

from modules.threshold.curve import PowerLawFit, ThresholdCurve


class RunReporter:
    """Plain-text summaries printed after each subcommand"""

    WIDTH = 60

    def _banner(self, title: str):
        print("\n" + "=" * self.WIDTH)
        print(title)
        print("=" * self.WIDTH)

    def print_curve(self, curve: ThresholdCurve, path: str):
        self._banner(f"THRESHOLD CURVE  {curve.layout.label()}")
        lo, hi = curve.support
        print(f"  Boundary points:     {len(curve.points):>15}")
        print(f"  Swept a values:      {len(curve.lines):>15}")
        print(f"  Saturated optima:    {curve.meta.get('saturated_points', 0):>15}")
        print(f"  P_e support:         {lo:>15.3e} .. {hi:.3e}")
        print(f"  Written to:          {path}")
        print("=" * self.WIDTH)

    def print_fit(self, fit: PowerLawFit):
        self._banner("POWER-LAW FIT  P_s = f * P_e^k")
        print(f"  Exponent k:          {fit.exponent:>15.6f}")
        print(f"  Prefactor f:         {fit.prefactor:>15.6f}")
        print(f"  Window:              {fit.window[0]:>15.1e} .. {fit.window[1]:.1e}")
        print(f"  Points in window:    {fit.n_points:>15}")
        print(f"  Max rel. residual:   {fit.residual:>15.3e}")
        if not fit.valid:
            print("\n  Residual above tolerance, fit rejected")
        print("=" * self.WIDTH)

    def print_verdicts(self, df: pd.DataFrame, title: str = "VERDICTS"):
        self._banner(title)
        total = len(df)
        flagged = int(df['nonclassical'].sum()) if total else 0
        print(f"  Rows:                {total:>15}")
        print(f"  Nonclassical:        {flagged:>15}")
        if 'confidence' in df:
            print(f"  Low confidence:      {int((df['confidence'] == 'low').sum()):>15}")
        print("=" * self.WIDTH)

    def print_files(self, paths):
        self._banner("FILES WRITTEN")
        for path in paths:
            print(f"  {path}")
        print("=" * self.WIDTH)
