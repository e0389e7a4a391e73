"""Logging configuration for hazardfield runs"""

import logging
import logging.handlers
from datetime import datetime
from pathlib import Path
from typing import Optional

# Chains, replications and likelihood chunks log from pool threads
LOG_FORMAT = "%(asctime)s - %(name)s - [%(threadName)s] - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

RUN_LOG_BYTES = 20 * 1024 * 1024
ERROR_LOG_BYTES = 5 * 1024 * 1024


def setup_logging(
    log_level: int = logging.INFO,
    log_dir: str = "logs",
    console_output: bool = True,
    file_output: bool = True,
    run_label: Optional[str] = None,
) -> Optional[Path]:
    """
    Configure the root logger for one command-line run

    Args:
        log_level: Logging level (default: INFO)
        log_dir: Directory for log files, created on demand
        console_output: Log to stderr
        file_output: Write the run log and errors.log under log_dir
        run_label: Command name used in the run log file name

    Returns:
        Path of the run log, or None without file output
    """
    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)
    root_logger.handlers.clear()

    if console_output:
        console_handler = logging.StreamHandler()
        console_handler.setLevel(log_level)
        console_handler.setFormatter(formatter)
        root_logger.addHandler(console_handler)

    run_log = None
    if file_output:
        log_path = Path(log_dir)
        log_path.mkdir(parents=True, exist_ok=True)
        stamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        run_log = log_path / f"hazardfield_{run_label or 'run'}_{stamp}.log"

        file_handler = logging.handlers.RotatingFileHandler(
            run_log, maxBytes=RUN_LOG_BYTES, backupCount=3
        )
        file_handler.setLevel(log_level)
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)

        # Errors from every run accumulate in one place
        error_handler = logging.handlers.RotatingFileHandler(
            log_path / "errors.log", maxBytes=ERROR_LOG_BYTES, backupCount=3
        )
        error_handler.setLevel(logging.ERROR)
        error_handler.setFormatter(formatter)
        root_logger.addHandler(error_handler)

    logging.info("=" * 60)
    logging.info(f"hazardfield {run_label or 'run'} starting")
    logging.info(f"Log Level: {logging.getLevelName(log_level)}")
    if run_log is not None:
        logging.info(f"Run log: {run_log.absolute()}")
    logging.info("=" * 60)
    return run_log


def parse_log_level(name: str) -> int:
    """Translate a level name such as "debug" into its logging constant"""
    level = logging.getLevelName(name.strip().upper())
    if not isinstance(level, int):
        raise ValueError(f"unknown log level '{name}'")
    return level


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance with the given name"""
    return logging.getLogger(name)
