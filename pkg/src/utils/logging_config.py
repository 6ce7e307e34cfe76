"""
Structured logging configuration for the concentra verification lab.

Console output goes to stderr so that reports printed on stdout stay
machine-readable; an optional rotating file keeps JSON lines.
"""

import json
import logging
import logging.handlers
import sys
from datetime import datetime
from pathlib import Path
from typing import Any

from src.utils.config import LabConfig
from src.utils.exceptions import ConfigurationError


_RESERVED_ATTRS = {
    "name",
    "msg",
    "args",
    "levelname",
    "levelno",
    "pathname",
    "filename",
    "module",
    "lineno",
    "funcName",
    "created",
    "msecs",
    "relativeCreated",
    "thread",
    "threadName",
    "processName",
    "process",
    "getMessage",
    "exc_info",
    "exc_text",
    "stack_info",
    "taskName",
}


class StructuredFormatter(logging.Formatter):
    """
    Formatter emitting one JSON object per record.

    Fields passed through `extra=` are merged into the object.
    """

    def format(self, record: logging.LogRecord) -> str:
        """
        Format log record as structured JSON.

        Args:
            record: Log record to format

        Returns:
            Formatted JSON log message
        """
        log_entry = {
            "timestamp": datetime.fromtimestamp(record.created).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }

        if record.exc_info:
            log_entry["exception"] = self.formatException(record.exc_info)

        for key, value in record.__dict__.items():
            if key not in _RESERVED_ATTRS:
                log_entry[key] = value

        return json.dumps(log_entry, default=str)


class LoggingConfig:
    """
    Logging configuration manager.

    Handles only logging setup and configuration.
    """

    def __init__(self, config: LabConfig) -> None:
        """
        Initialize logging configuration.

        Args:
            config: Lab configuration
        """
        self.config = config
        self._configured = False

    def setup_logging(self) -> None:
        """Set up structured logging for the lab."""
        if self._configured:
            return

        try:
            level = getattr(logging, self.config.log_level.upper())
            root_logger = logging.getLogger()
            root_logger.setLevel(level)
            root_logger.handlers.clear()

            formatter = StructuredFormatter()

            console_handler = logging.StreamHandler(sys.stderr)
            console_handler.setLevel(level)
            console_handler.setFormatter(formatter)
            root_logger.addHandler(console_handler)

            if self.config.log_file:
                log_file_path = Path(self.config.log_file)
                log_file_path.parent.mkdir(parents=True, exist_ok=True)
                file_handler = logging.handlers.RotatingFileHandler(
                    filename=self.config.log_file,
                    maxBytes=10 * 1024 * 1024,  # 10MB
                    backupCount=5,
                    encoding="utf-8",
                )
                file_handler.setLevel(logging.DEBUG)
                file_handler.setFormatter(formatter)
                root_logger.addHandler(file_handler)

            self._configure_specific_loggers(level)
            self._configured = True

            logging.getLogger(__name__).debug(
                "Logging configured",
                extra={"log_level": self.config.log_level, "log_file": self.config.log_file},
            )

        except Exception as e:
            raise ConfigurationError(f"Failed to configure logging: {str(e)}")

    def _configure_specific_loggers(self, level: int) -> None:
        """Configure package loggers and quiet third-party noise."""
        for name in ("src.services", "src.cli", "src.utils"):
            logging.getLogger(name).setLevel(level)

        logging.getLogger("numpy").setLevel(logging.WARNING)
        logging.getLogger("pandas").setLevel(logging.WARNING)


def log_verification_event(
    logger: logging.Logger,
    inequality: str,
    checked: int,
    violations: int,
    **kwargs: Any,
) -> None:
    """
    Log the outcome of one inequality verification.

    Args:
        logger: Logger instance
        inequality: Name of the inequality checked
        checked: Number of (grid point, instance) checks performed
        violations: Number of violations found
        **kwargs: Additional verification metadata
    """
    log = logger.warning if violations else logger.info
    log(
        f"Verified {inequality}: {checked} checks, {violations} violations",
        extra={
            "event_type": "verification",
            "inequality": inequality,
            "checked": checked,
            "violations": violations,
            **kwargs,
        },
    )


def log_trial_event(logger: logging.Logger, trial: int, seed: int, **kwargs: Any) -> None:
    """
    Log one Monte Carlo trial at debug level.

    Args:
        logger: Logger instance
        trial: Trial index
        seed: Derived trial seed
        **kwargs: Additional trial metadata
    """
    logger.debug(
        f"Trial {trial} finished",
        extra={"event_type": "trial", "trial": trial, "seed": seed, **kwargs},
    )


def log_performance_metric(
    logger: logging.Logger,
    metric_name: str,
    value: float,
    unit: str,
    **kwargs: Any,
) -> None:
    """
    Log performance metrics.

    Args:
        logger: Logger instance
        metric_name: Name of the metric
        value: Metric value
        unit: Unit of measurement
        **kwargs: Additional metric metadata
    """
    logger.info(
        f"Performance metric: {metric_name} = {value} {unit}",
        extra={
            "event_type": "performance_metric",
            "metric_name": metric_name,
            "metric_value": value,
            "metric_unit": unit,
            **kwargs,
        },
    )


def setup_logging(config: LabConfig) -> LoggingConfig:
    """
    Set up lab logging.

    Args:
        config: Lab configuration

    Returns:
        Configured logging instance
    """
    logging_config = LoggingConfig(config)
    logging_config.setup_logging()
    return logging_config
