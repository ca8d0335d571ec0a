"""
Logging configuration for the project.
"""

import logging
import os
import sys
from pathlib import Path
from typing import Dict, Optional, TextIO


_LEVEL_COLORS = {
    logging.DEBUG: "\033[36m",
    logging.INFO: "\033[32m",
    logging.WARNING: "\033[33m",
    logging.ERROR: "\033[31m",
    logging.CRITICAL: "\033[1;31m",
}
_RESET = "\033[0m"

_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
_DATEFMT = '%Y-%m-%d %H:%M:%S'

# Every logger handed out by setup_logger, so the CLI can change verbosity at once.
_registry: Dict[str, logging.Logger] = {}


class ColorFormatter(logging.Formatter):
    """Formatter that colors the level name."""

    def format(self, record: logging.LogRecord) -> str:
        color = _LEVEL_COLORS.get(record.levelno)
        if color is None:
            return super().format(record)
        original = record.levelname
        record.levelname = f"{color}{original}{_RESET}"
        try:
            return super().format(record)
        finally:
            record.levelname = original


def use_color(stream: TextIO) -> bool:
    """
    Decide whether log output on ``stream`` may be colored.

    NO_COLOR disables color whenever it is present, even if empty.
    """
    if "NO_COLOR" in os.environ:
        return False
    isatty = getattr(stream, "isatty", None)
    return bool(isatty and isatty())


def setup_logger(
    name: str,
    level: int = logging.INFO,
    log_file: Optional[str] = None
) -> logging.Logger:
    """
    Setup logger with console and optional file output.

    Args:
        name: Logger name
        level: Logging level
        log_file: Optional file path for logs

    Returns:
        Configured logger
    """
    logger = logging.getLogger(name)
    _registry[name] = logger

    # Prevent duplicate handlers
    if logger.handlers:
        return logger

    logger.setLevel(level)
    logger.propagate = False

    # Console handler
    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(logging.NOTSET)
    if use_color(sys.stdout):
        console_handler.setFormatter(ColorFormatter(_FORMAT, datefmt=_DATEFMT))
    else:
        console_handler.setFormatter(logging.Formatter(_FORMAT, datefmt=_DATEFMT))
    logger.addHandler(console_handler)

    # File handler if specified
    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(logging.NOTSET)
        file_handler.setFormatter(logging.Formatter(_FORMAT, datefmt=_DATEFMT))
        logger.addHandler(file_handler)

    return logger


def set_log_level(level: int) -> None:
    """Apply ``level`` to every logger created through setup_logger."""
    for logger in _registry.values():
        logger.setLevel(level)
