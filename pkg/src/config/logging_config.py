"""
Logging Configuration for LightRig
Sets up colored console logging and optional JSON file logging
"""

import logging
import sys
import threading
from logging.handlers import RotatingFileHandler, TimedRotatingFileHandler
from pathlib import Path
from typing import Optional

import colorlog
from pythonjsonlogger import jsonlogger


def setup_logging(
    log_dir: str = 'logs',
    level: str = 'INFO',
    log_file: str = 'lightrig.log',
    file_logging: bool = False,
    rotation: str = 'daily',
    retention_days: int = 30,
    max_file_size_mb: int = 100,
    console_colors: bool = True
) -> logging.Logger:
    """
    Setup logging with a console handler and an optional file handler

    Console output goes to stderr; stdout is reserved for machine-readable
    command output.

    Args:
        log_dir: Directory for log files
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Log file name
        file_logging: Also write JSON records to a rotating file
        rotation: Rotation strategy ('daily', 'weekly', or 'size')
        retention_days: Days to retain logs
        max_file_size_mb: Max file size for size-based rotation
        console_colors: Enable colored console output

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger('lightrig')
    logger.setLevel(getattr(logging, level.upper(), logging.INFO))
    logger.handlers.clear()
    logger.propagate = False

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.DEBUG)

    if console_colors:
        console_formatter = colorlog.ColoredFormatter(
            fmt='%(log_color)s%(asctime)s [%(levelname)-8s]%(reset)s %(name)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S',
            log_colors={
                'DEBUG': 'cyan',
                'INFO': 'green',
                'WARNING': 'yellow',
                'ERROR': 'red',
                'CRITICAL': 'red,bg_white',
            }
        )
    else:
        console_formatter = logging.Formatter(
            fmt='%(asctime)s [%(levelname)-8s] %(name)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )

    console_handler.setFormatter(console_formatter)
    logger.addHandler(console_handler)

    if not file_logging:
        return logger

    log_path = Path(log_dir)
    log_path.mkdir(parents=True, exist_ok=True)
    log_file_path = log_path / log_file

    if rotation == 'daily':
        file_handler = TimedRotatingFileHandler(
            filename=log_file_path,
            when='midnight',
            interval=1,
            backupCount=retention_days,
            encoding='utf-8'
        )
    elif rotation == 'weekly':
        file_handler = TimedRotatingFileHandler(
            filename=log_file_path,
            when='W0',  # Monday
            interval=1,
            backupCount=int(retention_days / 7),
            encoding='utf-8'
        )
    else:  # size-based rotation
        file_handler = RotatingFileHandler(
            filename=log_file_path,
            maxBytes=max_file_size_mb * 1024 * 1024,
            backupCount=10,
            encoding='utf-8'
        )

    file_handler.setLevel(logging.DEBUG)

    json_formatter = jsonlogger.JsonFormatter(
        fmt='%(asctime)s %(name)s %(levelname)s %(message)s',
        datefmt='%Y-%m-%dT%H:%M:%S'
    )
    file_handler.setFormatter(json_formatter)
    logger.addHandler(file_handler)

    return logger


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance for a specific module

    Args:
        name: Logger name (usually __name__)

    Returns:
        Logger instance
    """
    return logging.getLogger(f'lightrig.{name}')


class JobLogger:
    """
    Specialized logger for batch image jobs
    Tracks per-camera job lifecycle; counters are safe to update from worker threads
    """

    def __init__(self, total: int, logger: Optional[logging.Logger] = None):
        """
        Initialize job logger

        Args:
            total: Number of jobs in the batch
            logger: Base logger instance (default: lightrig.jobs)
        """
        self.logger = logger or logging.getLogger('lightrig.jobs')
        self.total = total
        self.started_count = 0
        self.success_count = 0
        self.failed_count = 0
        self._lock = threading.Lock()

    @property
    def finished_count(self) -> int:
        """Jobs that reached a final state"""
        with self._lock:
            return self.success_count + self.failed_count

    def log_started(self, camera: str, source: str):
        """Log job start"""
        with self._lock:
            self.started_count += 1
        self.logger.debug(
            "Job started",
            extra={'camera': camera, 'source': source, 'status': 'STARTED'}
        )

    def log_success(self, camera: str, output: str, elapsed_ms: float):
        """Log successful job"""
        with self._lock:
            self.success_count += 1
            done = self.success_count + self.failed_count
        self.logger.info(
            f"[{done}/{self.total}] {camera} -> {output}",
            extra={
                'camera': camera,
                'status': 'SUCCESS',
                'output': output,
                'elapsed_ms': round(elapsed_ms, 3),
            }
        )

    def log_failure(self, camera: str, error: str, category: str):
        """Log failed job"""
        with self._lock:
            self.failed_count += 1
            done = self.success_count + self.failed_count
        self.logger.error(
            f"[{done}/{self.total}] {camera} failed: {error}",
            extra={
                'camera': camera,
                'status': f'FAILED_{category.upper()}',
                'error': error,
            }
        )

    def log_summary(self):
        """Log aggregate batch metrics"""
        with self._lock:
            success, failed = self.success_count, self.failed_count
        finished = self.finished_count
        self.logger.info(
            f"Batch summary: {finished}/{self.total} finished, {failed} failed",
            extra={
                'metric_type': 'batch_summary',
                'total_jobs': self.total,
                'finished_count': finished,
                'success_count': success,
                'failed_count': failed,
                'success_rate': round(success / self.total, 3) if self.total else 1.0,
            }
        )
