"""
Integration tests for the command line, run configuration and result files
"""
import json

import pytest
import pandas as pd

import main
from modules.network.layouts import unbalanced_bs
from modules.simulation.runner import ExperimentRunner
from modules.threshold.curve_io import load_curve, save_curve
from modules.utils.exceptions import ConfigurationException, CurveValidationException
from modules.utils.exporter import ResultExporter
from modules.utils.run_config import RunConfig, build_run_config, load_config_file

SMALL_SWEEP = ['--a-points', '50', '--a-min', '1', '--a-max', '1e4', '--workers', '2']


@pytest.fixture(scope='module')
def curve_file(tmp_path_factory):
    """Balanced BS curve written through the CLI"""
    path = tmp_path_factory.mktemp('curves') / 'bs.csv'
    code = main.main(['threshold', '--layout', 'bs', '--t', '0.5', *SMALL_SWEEP, '--out', str(path)])
    assert code == 0
    return path


@pytest.mark.integration
class TestThresholdCommand:
    """Test 'threshold'"""

    def test_writes_csv_and_sidecar(self, curve_file):
        df = pd.read_csv(curve_file)
        assert len(df) == 50
        assert {'a', 'p_error', 'p_success_max', 'w_max', 'on_boundary'} <= set(df.columns)
        sidecar = json.loads(curve_file.with_suffix('.json').read_text())
        assert sidecar['config']['a_points'] == 50
        assert sidecar['diagnostics']['layout']['kind'] == 'bs'

    def test_reload_validates(self, curve_file):
        curve = load_curve(str(curve_file))
        assert curve.layout == unbalanced_bs(0.5)
        assert len(curve.lines) == 50

    def test_missing_transmission_is_usage_error(self, tmp_path):
        code = main.main(['threshold', '--layout', 'mz', '--t1', '0.5', '--out', str(tmp_path / 'c.csv')])
        assert code == 2

    def test_unknown_layout_rejected_by_parser(self):
        with pytest.raises(SystemExit) as exc:
            main.main(['threshold', '--layout', 'prism'])
        assert exc.value.code == 2


@pytest.mark.integration
class TestFitCommand:
    """Test 'fit'"""

    def test_square_root_law(self, curve_file, capsys):
        assert main.main(['fit', '--curve', str(curve_file)]) == 0
        out = capsys.readouterr().out
        assert 'POWER-LAW FIT' in out
        assert '0.50' in out

    def test_curve_flag_required(self):
        with pytest.raises(SystemExit) as exc:
            main.main(['fit'])
        assert exc.value.code == 2

    def test_empty_window_is_numerical_failure(self, curve_file):
        assert main.main(['fit', '--curve', str(curve_file), '--window', '1e-30,1e-29']) == 1

    def test_missing_curve_file(self, tmp_path):
        assert main.main(['fit', '--curve', str(tmp_path / 'none.csv')]) == 2


@pytest.mark.integration
class TestClassifyCommand:
    """Test 'classify'"""

    def test_verdicts(self, curve_file, tmp_path):
        stats = tmp_path / 'measured.csv'
        pd.DataFrame({'p_success': [0.05, 0.9e-4], 'p_error': [5e-7, 1e-8]}).to_csv(stats, index=False)
        out = tmp_path / 'verdicts.csv'
        code = main.main(['classify', '--curve', str(curve_file), '--stats', str(stats), '--out', str(out)])
        assert code == 0
        verdicts = pd.read_csv(out)
        assert verdicts['nonclassical'].tolist() == [True, False]
        sidecar = json.loads(out.with_suffix('.json').read_text())
        assert sidecar['diagnostics']['provenance'] == 'ingested'

    def test_stats_columns_required(self, curve_file, tmp_path):
        stats = tmp_path / 'bad.csv'
        pd.DataFrame({'ps': [0.1]}).to_csv(stats, index=False)
        assert main.main(['classify', '--curve', str(curve_file), '--stats', str(stats)]) == 2


@pytest.mark.integration
class TestSimulateCommand:
    """Test 'simulate' against a stored curve"""

    def test_nbar_sweep(self, curve_file, tmp_path):
        out = tmp_path / 'sim.csv'
        code = main.main(['simulate', '--layout', 'bs', '--t', '0.5', '--curve', str(curve_file),
                          '--eta', '0.1', '--sweep', 'nbar', '--sweep-min', '1e-6', '--sweep-max', '1e-2',
                          '--sweep-points', '5', '--out', str(out)])
        assert code == 0
        df = pd.read_csv(out)
        assert len(df) == 5
        assert df['nonclassical'].all()
        assert json.loads(out.with_suffix('.json').read_text())['diagnostics']['verdict_flips'] == 0

    def test_fresh_curve_when_none_stored(self, mocker, curve_file, tmp_path):
        cfg = build_run_config({'layout': 'bs', 't': 0.5, 'sweep_points': 3, 'out': str(tmp_path / 's.csv')})
        runner = ExperimentRunner(cfg)
        compute = mocker.patch.object(ExperimentRunner, 'compute_curve',
                                      return_value=load_curve(str(curve_file)))
        runner.run_simulate()
        compute.assert_called_once()


class TestRunConfig:
    """Test flag, file and default precedence"""

    def test_defaults(self):
        cfg = build_run_config({})
        assert cfg.layout == 'bs'
        assert cfg.a_points == 200

    def test_flags_override_file(self, tmp_path):
        path = tmp_path / 'run.cfg'
        path.write_text("# mz run\nlayout = mz\nt1 = 0.5\nt2 = 0.7\na-points = 60  # fewer\n")
        cfg = build_run_config({'t2': 0.6, 'eta': None}, str(path))
        assert cfg.layout == 'mz'
        assert cfg.t2 == 0.6
        assert cfg.a_points == 60

    def test_unknown_key(self, tmp_path):
        path = tmp_path / 'run.cfg'
        path.write_text("colour = blue\n")
        with pytest.raises(ConfigurationException):
            load_config_file(str(path))

    def test_malformed_line(self, tmp_path):
        path = tmp_path / 'run.cfg'
        path.write_text("layout mz\n")
        with pytest.raises(ConfigurationException):
            load_config_file(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationException):
            build_run_config({}, str(tmp_path / 'absent.cfg'))

    def test_window_parsing(self):
        assert build_run_config({'window': '1e-9,1e-5'}).window == (1e-9, 1e-5)
        with pytest.raises(ConfigurationException):
            build_run_config({'window': '1e-5,1e-9'})

    def test_out_of_range(self):
        with pytest.raises(ConfigurationException):
            RunConfig(eta=1.2).validate()
        with pytest.raises(ConfigurationException):
            RunConfig(a_points=10).validate()


class TestResultExporter:
    """Test number formatting and sidecars"""

    def test_format_value(self):
        exporter = ResultExporter()
        assert exporter.format_value(1e-5) == '1.0000000000e-05'
        assert exporter.format_value(0.5) == '0.500000000000'
        assert exporter.format_value(0.0) == '0.000000000000'
        assert exporter.format_value(True) == 'True'
        assert exporter.format_value(3) == '3'
        assert exporter.format_value(float('nan')) == 'nan'

    def test_export_writes_sidecar(self, tmp_path):
        path = tmp_path / 'out' / 'table.csv'
        ResultExporter().export(pd.DataFrame({'x': [1e-7, 0.25]}), str(path), {'layout': 'bs'}, {'n': 2})
        sidecar = ResultExporter.read_sidecar(str(path))
        assert sidecar['config'] == {'layout': 'bs'}
        assert sidecar['rows'] == 2
        assert ResultExporter.read_csv(str(path))['x'].tolist() == [1e-7, 0.25]

    def test_missing_sidecar_is_empty(self, tmp_path):
        assert ResultExporter.read_sidecar(str(tmp_path / 'nothing.csv')) == {}


class TestCurveFiles:
    """Test curve persistence"""

    def test_layout_required_without_sidecar(self, tmp_path):
        path = tmp_path / 'bare.csv'
        pd.DataFrame({'p_error': [1e-6, 1e-4], 'p_success_max': [1e-3, 1e-2]}).to_csv(path, index=False)
        with pytest.raises(ConfigurationException):
            load_curve(str(path))
        curve = load_curve(str(path), layout=unbalanced_bs(0.5))
        assert len(curve.points) == 2

    def test_missing_columns(self, tmp_path):
        path = tmp_path / 'bad.csv'
        pd.DataFrame({'p_error': [1e-6]}).to_csv(path, index=False)
        with pytest.raises(CurveValidationException):
            load_curve(str(path), layout=unbalanced_bs(0.5))

    def test_non_concave_rejected(self, tmp_path):
        path = tmp_path / 'kinked.csv'
        pd.DataFrame({
            'p_error': [0.0, 0.1, 0.2],
            'p_success_max': [0.0, 0.05, 0.6],
            'on_boundary': [True, True, True],
        }).to_csv(path, index=False)
        with pytest.raises(CurveValidationException):
            load_curve(str(path), layout=unbalanced_bs(0.5))

    def test_save_load_keeps_lines(self, curve_file, tmp_path):
        curve = load_curve(str(curve_file))
        copy = tmp_path / 'copy.csv'
        save_curve(curve, str(copy))
        again = load_curve(str(copy))
        assert again.envelope(1e-6)[0] == pytest.approx(curve.envelope(1e-6)[0], rel=1e-9)


class TestLogging:
    """Test console verbosity and log retention"""

    def test_quiet_raises_console_level(self, curve_file):
        import logging
        from modules.utils.logger import PhotonLogger, get_logger
        log = get_logger('modules.threshold.curve_io')
        assert main.main(['--quiet', 'fit', '--curve', str(curve_file)]) == 0
        consoles = [h for h in log.handlers if type(h) is logging.StreamHandler]
        assert all(h.level == logging.WARNING for h in consoles)
        PhotonLogger.set_console_level(logging.INFO)

    def test_cleanup_old_logs(self, tmp_path):
        import os
        from modules.utils.logger import PhotonLogger
        old = tmp_path / 'photon4n_20000101.log'
        old.write_text('x')
        os.utime(old, (0, 0))
        fresh = tmp_path / 'photon4n_error_20990101.log'
        fresh.write_text('y')
        assert PhotonLogger.cleanup_old_logs(tmp_path, days_to_keep=7) == 1
        assert fresh.exists()
