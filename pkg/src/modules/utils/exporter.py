import json
import math
import os
import sys
from typing import Dict, Optional

import numpy as np
import pandas as pd

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '../../')))
import config
from modules.utils.exceptions import ConfigurationException
from modules.utils.logger import get_logger

logger = get_logger(__name__)


class ResultExporter:
    """
    Writes result tables as CSV (fixed float formatting) with a JSON sidecar
    holding the effective configuration and diagnostics
    """

    def __init__(self, sci_threshold: Optional[float] = None):
        opts = config.EXPORT_CONFIG
        self.sci_threshold = opts['sci_threshold'] if sci_threshold is None else sci_threshold
        self.sci_format = opts['sci_format']
        self.fixed_format = opts['fixed_format']

    def format_value(self, value) -> str:
        if isinstance(value, (bool, np.bool_)):
            return str(bool(value))
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        if isinstance(value, (float, np.floating)):
            value = float(value)
            if math.isnan(value) or math.isinf(value):
                return str(value)
            if value != 0.0 and abs(value) < self.sci_threshold:
                return self.sci_format.format(value)
            return self.fixed_format.format(value)
        return str(value)

    def format_frame(self, df: pd.DataFrame) -> pd.DataFrame:
        out = pd.DataFrame(index=df.index)
        for col in df.columns:
            out[col] = [self.format_value(v) for v in df[col].tolist()]
        return out

    @staticmethod
    def sidecar_path(csv_path: str) -> str:
        return os.path.splitext(csv_path)[0] + '.json'

    def write_csv(self, df: pd.DataFrame, path: str) -> str:
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        self.format_frame(df).to_csv(path, index=False)
        logger.info(f"Wrote {len(df)} rows to {path}")
        return path

    def write_sidecar(self, csv_path: str, payload: Dict) -> str:
        path = self.sidecar_path(csv_path)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(payload, f, indent=2, sort_keys=True, default=_json_default)
        logger.debug(f"Sidecar written: {path}")
        return path

    def export(self, df: pd.DataFrame, path: str, run_config: Optional[Dict] = None,
               diagnostics: Optional[Dict] = None) -> str:
        self.write_csv(df, path)
        self.write_sidecar(path, {
            'config': run_config or {},
            'diagnostics': diagnostics or {},
            'columns': list(df.columns),
            'rows': int(len(df)),
        })
        return path

    @staticmethod
    def read_csv(path: str) -> pd.DataFrame:
        if not os.path.exists(path):
            raise ConfigurationException(f"File not found: {path}")
        try:
            return pd.read_csv(path)
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise ConfigurationException(f"Malformed CSV {path}: {e}")

    @classmethod
    def read_sidecar(cls, csv_path: str) -> Dict:
        path = cls.sidecar_path(csv_path)
        if not os.path.exists(path):
            return {}
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset, tuple)):
        return sorted(obj) if isinstance(obj, (set, frozenset)) else list(obj)
    return str(obj)
