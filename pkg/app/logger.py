"""
Logging configuration.
Provides structured JSON logging for the p-adic Darboux toolkit.
"""

import json
import logging
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

from app.config import settings

LOGGER_NAME = "padic_darboux"


class JsonFormatter(logging.Formatter):
    """Custom formatter that outputs JSON logs for structured logging."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as JSON."""
        log_data = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        if hasattr(record, "extra_data"):
            log_data.update(record.extra_data)

        return json.dumps(log_data, default=str)


def setup_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> logging.Logger:
    """
    Configure logging with a rotating JSON file handler and a console handler.

    Args:
        level: Log level name; defaults to settings.log_level
        log_file: Log file path; defaults to settings.log_file, "" disables it

    Returns:
        logging.Logger: Configured logger instance
    """
    level_name = (level or settings.log_level).upper()
    log_path = settings.log_file if log_file is None else log_file

    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(getattr(logging, level_name))

    # Remove existing handlers to avoid duplicates
    logger.handlers.clear()
    logger.propagate = False

    if log_path:
        path = Path(log_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            filename=path,
            maxBytes=10 * 1024 * 1024,  # 10 MB
            backupCount=5,
        )
        file_handler.setLevel(getattr(logging, level_name))
        file_handler.setFormatter(JsonFormatter())
        logger.addHandler(file_handler)

    console_handler = logging.StreamHandler()
    console_handler.setLevel(logging.WARNING if not settings.debug else getattr(logging, level_name))
    console_handler.setFormatter(
        logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    )
    logger.addHandler(console_handler)

    return logger


# Initialize logger
logger = setup_logging()


def log_with_context(message: str, level: str = "INFO", **context) -> None:
    """
    Log a message with additional structured context.

    Args:
        message: The log message
        level: Log level (INFO, DEBUG, WARNING, ERROR, CRITICAL)
        **context: Additional context data merged into the JSON record
    """
    logger.log(getattr(logging, level.upper(), logging.INFO), message, extra={"extra_data": context})
