import argparse
import logging
import sys
import os

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import config

try:
    from modules.simulation.reporter import RunReporter
    from modules.simulation.runner import FIGURES, ExperimentRunner
    from modules.utils.exceptions import (
        ConfigurationException,
        NetworkException,
        DetectionException,
        OracleException,
        SourceModelException,
        ThresholdException,
    )
    from modules.utils.logger import PhotonLogger, get_logger
    from modules.utils.run_config import LAYOUTS, SWEEP_VARIABLES, build_run_config
    from modules.threshold.curve_io import load_curve
except ImportError as e:
    print(f"Error importing modules: {e}")
    sys.exit(1)

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2

# argparse dest -> RunConfig key
_FLAG_KEYS = ('layout', 't', 't1', 't2', 'phase', 'eta', 'nbar', 'coherence', 'noise_coherence',
              'indist', 'a_min', 'a_max', 'a_points', 'quad_nodes', 'window', 'sweep', 'sweep_min',
              'sweep_max', 'sweep_points', 'curve', 'stats', 'out', 'workers')


def run_threshold(runner, reporter):
    print("[MODE] Threshold curve")
    path = runner.run_threshold()
    reporter.print_curve(load_curve(path), path)
    return EXIT_OK


def run_simulate(runner, reporter):
    print("[MODE] Source simulation")
    df = runner.run_simulate()
    reporter.print_verdicts(df, "SOURCE VERDICTS")
    return EXIT_OK


def run_fit(runner, reporter):
    print("[MODE] Power-law fit")
    fit = runner.run_fit()
    reporter.print_fit(fit)
    return EXIT_OK if fit.valid else EXIT_NUMERICAL


def run_classify(runner, reporter):
    print("[MODE] Classify statistics")
    df = runner.run_classify()
    reporter.print_verdicts(df, "INGESTED VERDICTS")
    return EXIT_OK


def run_reproduce(runner, reporter, figure):
    print(f"[MODE] Figure data {figure}")
    reporter.print_files(runner.run_reproduce(figure))
    return EXIT_OK


def _add_common(parser):
    parser.add_argument('--layout', choices=LAYOUTS, help="Detection layout")
    parser.add_argument('--t', type=float, help="Transmission (bs, or both BS of the other layouts)")
    parser.add_argument('--t1', type=float, help="Transmission of BS1")
    parser.add_argument('--t2', type=float, help="Transmission of BS2")
    parser.add_argument('--phase', type=float, help="Mach-Zehnder internal phase (rad)")
    parser.add_argument('--a-min', dest='a_min', type=float, help="Smallest |a| of the sweep (default: 1e-2)")
    parser.add_argument('--a-max', dest='a_max', type=float, help="Largest |a| of the sweep (default: 1e6)")
    parser.add_argument('--a-points', dest='a_points', type=int, help="Number of a values (default: 200)")
    parser.add_argument('--quad-nodes', dest='quad_nodes', type=int, help="Phase quadrature nodes (default: 256)")
    parser.add_argument('--workers', type=int, help="Threads for the a sweep")
    parser.add_argument('--out', help="Output file (directory for reproduce)")
    parser.add_argument('--config', help="key=value settings file")


def _add_source(parser):
    parser.add_argument('--eta', type=float, help="Single-photon efficiency")
    parser.add_argument('--nbar', type=float, help="Mean background photons per copy")
    parser.add_argument('--coherence', type=float, help="Signal Mach-Zehnder visibility (1 = monochromatic)")
    parser.add_argument('--noise-coherence', dest='noise_coherence', type=float, help="Background visibility")
    parser.add_argument('--indist', type=float, help="Indistinguishability of the two copies")


def build_parser():
    parser = argparse.ArgumentParser(description="Nonclassicality thresholds for click-detector layouts")
    parser.add_argument('--quiet', action='store_true', help="Console shows warnings and errors only")
    sub = parser.add_subparsers(dest='mode', required=True)

    p = sub.add_parser('threshold', help="Trace the classical threshold curve of a layout")
    _add_common(p)

    p = sub.add_parser('simulate', help="Sweep eta or nbar and classify the source statistics")
    _add_common(p)
    _add_source(p)
    p.add_argument('--sweep', choices=SWEEP_VARIABLES, help="Swept source parameter (default: nbar)")
    p.add_argument('--sweep-min', dest='sweep_min', type=float, help="Sweep start (0 gives a linear sweep)")
    p.add_argument('--sweep-max', dest='sweep_max', type=float, help="Sweep end")
    p.add_argument('--sweep-points', dest='sweep_points', type=int, help="Sweep length")
    p.add_argument('--curve', help="Stored curve CSV instead of a fresh sweep")

    p = sub.add_parser('fit', help="Fit P_s = f * P_e^k on a stored curve")
    p.add_argument('--curve', required=True, help="Curve CSV written by 'threshold'")
    p.add_argument('--window', help="P_e window 'lo,hi' (default: 1e-8,1e-4)")
    p.add_argument('--config', help="key=value settings file")

    p = sub.add_parser('classify', help="Classify measured (P_s, P_e) rows against a curve")
    p.add_argument('--curve', required=True, help="Curve CSV written by 'threshold'")
    p.add_argument('--stats', required=True, help="CSV with p_success and p_error columns")
    p.add_argument('--out', help="Verdict CSV")
    p.add_argument('--config', help="key=value settings file")

    p = sub.add_parser('reproduce', help="Write the data behind one figure")
    p.add_argument('figure', choices=FIGURES)
    p.add_argument('--a-points', dest='a_points', type=int, help="Number of a values (default: 200)")
    p.add_argument('--workers', type=int, help="Threads for the a sweep")
    p.add_argument('--out', help="Output directory")
    p.add_argument('--config', help="key=value settings file")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.quiet:
        PhotonLogger.set_console_level(logging.WARNING)
    PhotonLogger.cleanup_old_logs(config.LOGGING_CONFIG['log_dir'], config.LOGGING_CONFIG['days_to_keep'])

    flags = {key: getattr(args, key) for key in _FLAG_KEYS if hasattr(args, key)}
    try:
        cfg = build_run_config(flags, args.config)
        runner = ExperimentRunner(cfg)
        reporter = RunReporter()
        if args.mode == 'threshold':
            return run_threshold(runner, reporter)
        if args.mode == 'simulate':
            return run_simulate(runner, reporter)
        if args.mode == 'fit':
            return run_fit(runner, reporter)
        if args.mode == 'classify':
            return run_classify(runner, reporter)
        return run_reproduce(runner, reporter, args.figure)
    except (ConfigurationException, NetworkException, DetectionException) as e:
        logger.error(f"Usage error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ThresholdException, SourceModelException, OracleException) as e:
        logger.error(f"Numerical failure: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
