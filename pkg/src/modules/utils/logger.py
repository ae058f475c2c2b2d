"""
Logging Module - Centralized logging configuration
"""

import logging
import sys
from datetime import datetime
from pathlib import Path


class PhotonLogger:
    """
    Centralized logger for Photon4N
    """
    _loggers = {}

    @staticmethod
    def _default_log_dir():
        # project_root/logs (utils -> modules -> src -> root)
        return Path(__file__).parent.parent.parent.parent / "logs"

    @staticmethod
    def get_logger(name, log_dir=None, log_level=logging.INFO):
        """
        Get or create a logger instance

        Args:
            name: Logger name (usually module name)
            log_dir: Directory to store log files (default: project_root/logs)
            log_level: Logging level (default: INFO)

        Returns:
            logging.Logger instance
        """
        if name in PhotonLogger._loggers:
            return PhotonLogger._loggers[name]

        logger = logging.getLogger(name)
        logger.setLevel(logging.DEBUG)
        logger.propagate = False

        log_dir = Path(log_dir) if log_dir is not None else PhotonLogger._default_log_dir()
        log_dir.mkdir(parents=True, exist_ok=True)

        formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )

        # Console keeps stdout readable for sweeps; files get everything
        console_handler = logging.StreamHandler(sys.stdout)
        console_handler.setLevel(log_level)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

        today = datetime.now().strftime('%Y%m%d')
        file_handler = logging.FileHandler(log_dir / f"photon4n_{today}.log", encoding='utf-8')
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

        error_handler = logging.FileHandler(log_dir / f"photon4n_error_{today}.log", encoding='utf-8')
        error_handler.setLevel(logging.ERROR)
        error_handler.setFormatter(formatter)
        logger.addHandler(error_handler)

        PhotonLogger._loggers[name] = logger
        return logger

    @staticmethod
    def set_console_level(level):
        """Change the console verbosity of every logger created so far"""
        for logger in PhotonLogger._loggers.values():
            for handler in logger.handlers:
                if type(handler) is logging.StreamHandler:
                    handler.setLevel(level)

    @staticmethod
    def cleanup_old_logs(log_dir=None, days_to_keep=7):
        """
        Remove log files older than specified days

        Args:
            log_dir: Directory containing log files
            days_to_keep: Number of days to keep (default: 7)
        """
        log_dir = Path(log_dir) if log_dir is not None else PhotonLogger._default_log_dir()
        if not log_dir.exists():
            return 0

        cutoff_time = datetime.now().timestamp() - (days_to_keep * 86400)
        removed = 0
        for log_file in log_dir.glob("photon4n_*.log"):
            if log_file.stat().st_mtime < cutoff_time:
                try:
                    log_file.unlink()
                    removed += 1
                except OSError:
                    pass
        return removed


def get_logger(name):
    """Get logger instance - shorthand function"""
    return PhotonLogger.get_logger(name)
