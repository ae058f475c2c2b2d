"""
Run Configuration - effective settings of one CLI run

Precedence: command-line flags > `--config` key=value file > config.py defaults.
"""
import os
import sys
from dataclasses import asdict, dataclass, fields
from typing import Dict, Optional, Tuple

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '../../')))
import config
from modules.utils.exceptions import ConfigurationException
from modules.utils.logger import get_logger
from modules.utils.validator import validate_range

logger = get_logger(__name__)

LAYOUTS = ('bs', 'mz', 'hom', 'twocopy')
SWEEP_VARIABLES = ('nbar', 'eta')


@dataclass
class RunConfig:
    layout: str = 'bs'
    t: Optional[float] = None
    t1: Optional[float] = None
    t2: Optional[float] = None
    phase: float = 0.0
    eta: float = config.SOURCE_DEFAULTS['eta']
    nbar: float = config.SOURCE_DEFAULTS['nbar']
    coherence: float = config.SOURCE_DEFAULTS['signal_coherence']
    noise_coherence: float = config.SOURCE_DEFAULTS['noise_coherence']
    indist: float = config.SOURCE_DEFAULTS['indistinguishability']
    a_min: float = config.SWEEP_CONFIG['a_min']
    a_max: float = config.SWEEP_CONFIG['a_max']
    a_points: int = config.SWEEP_CONFIG['a_points']
    quad_nodes: int = config.QUADRATURE_CONFIG['nodes']
    window: Tuple[float, float] = config.FIT_CONFIG['window']
    sweep: str = 'nbar'
    sweep_min: float = 1e-6
    sweep_max: float = 1e-2
    sweep_points: int = 41
    curve: Optional[str] = None
    stats: Optional[str] = None
    out: Optional[str] = None
    workers: int = config.SWEEP_CONFIG['max_workers']

    def validate(self) -> 'RunConfig':
        if self.layout not in LAYOUTS:
            raise ConfigurationException(f"layout must be one of {LAYOUTS}, got '{self.layout}'")
        if self.sweep not in SWEEP_VARIABLES:
            raise ConfigurationException(f"sweep must be one of {SWEEP_VARIABLES}, got '{self.sweep}'")
        for name in ('t', 't1', 't2'):
            value = getattr(self, name)
            if value is not None:
                validate_range(value, 0.0, 1.0, name)
        for name in ('eta', 'coherence', 'noise_coherence', 'indist'):
            validate_range(getattr(self, name), 0.0, 1.0, name)
        validate_range(self.nbar, 0.0, float('inf'), 'nbar')
        validate_range(self.a_min, 1e-12, self.a_max, 'a_min')
        validate_range(self.a_points, config.SWEEP_CONFIG['min_points'], 10000, 'a_points')
        validate_range(self.quad_nodes, config.QUADRATURE_CONFIG['min_nodes'], 65536, 'quad_nodes')
        validate_range(self.sweep_min, 0.0, self.sweep_max, 'sweep_min')
        validate_range(self.sweep_points, 2, 10000, 'sweep_points')
        validate_range(self.workers, 1, 256, 'workers')
        lo, hi = self.window
        if not 0 < lo < hi <= 1:
            raise ConfigurationException(f"window must satisfy 0 < lo < hi <= 1, got {self.window}")
        return self

    def to_dict(self) -> Dict:
        data = asdict(self)
        data['window'] = list(self.window)
        return data


_FIELDS = {f.name: f for f in fields(RunConfig)}
_INT_KEYS = {'a_points', 'quad_nodes', 'sweep_points', 'workers'}
_STR_KEYS = {'layout', 'sweep', 'curve', 'stats', 'out'}


def parse_window(text) -> Tuple[float, float]:
    if isinstance(text, (tuple, list)):
        parts = list(text)
    else:
        parts = str(text).replace(':', ',').split(',')
    try:
        lo, hi = (float(x) for x in parts)
    except ValueError:
        raise ConfigurationException(f"window must be 'lo,hi', got {text!r}")
    return lo, hi


def _convert(key: str, raw: str):
    raw = raw.strip()
    if key in _STR_KEYS:
        return raw
    if key == 'window':
        return parse_window(raw)
    if raw.lower() in ('', 'none'):
        return None
    try:
        return int(raw) if key in _INT_KEYS else float(raw)
    except ValueError:
        raise ConfigurationException(f"Invalid value for '{key}': {raw!r}")


def load_config_file(path: str) -> Dict:
    """key=value lines; '#' comments and blank lines are skipped"""
    if not os.path.exists(path):
        raise ConfigurationException(f"Config file not found: {path}")
    values = {}
    with open(path, 'r', encoding='utf-8') as f:
        for lineno, line in enumerate(f, start=1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise ConfigurationException(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, raw = (part.strip() for part in line.split('=', 1))
            key = key.replace('-', '_')
            if key not in _FIELDS:
                raise ConfigurationException(f"{path}:{lineno}: unknown key '{key}'")
            values[key] = _convert(key, raw)
    logger.debug(f"Loaded {len(values)} keys from {path}")
    return values


def build_run_config(flags: Optional[Dict] = None, config_path: Optional[str] = None) -> RunConfig:
    """Merge defaults, file values and explicit (non-None) flags"""
    values = {}
    if config_path:
        values.update(load_config_file(config_path))
    for key, value in (flags or {}).items():
        if value is None:
            continue
        if key not in _FIELDS:
            raise ConfigurationException(f"Unknown setting '{key}'")
        values[key] = parse_window(value) if key == 'window' else value
    return RunConfig(**values).validate()
