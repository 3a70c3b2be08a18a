# config/logging_config.py
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import Dict, Optional, Union

from config.app_config import config

ROOT_LOGGER_NAME = "conditional_bo"

LOG_FORMAT = "%(asctime)s %(levelname)-8s %(name)s: %(message)s"


class LoggerFactory:
    """Factory for module loggers under the `conditional_bo` namespace.

    Console output goes to stderr so that command output on stdout stays parseable.
    """

    # Dictionary to store logger instances
    _loggers: Dict[str, logging.Logger] = {}
    _level: Optional[int] = None

    @classmethod
    def get_logger(cls, name: str, log_to_file: Optional[bool] = None) -> logging.Logger:
        """Get or create a logger with the specified name.

        Args:
            name: Module name, without the namespace prefix
            log_to_file: Also write to LOG_DIR (defaults to the LOG_TO_FILE setting)

        Returns:
            A configured logger
        """
        if name in cls._loggers:
            return cls._loggers[name]

        logger = logging.getLogger(f"{ROOT_LOGGER_NAME}.{name}")
        if not logger.handlers:
            settings = config.logging
            cls._configure_logger(logger, settings.log_to_file if log_to_file is None else log_to_file)

        cls._loggers[name] = logger
        return logger

    @classmethod
    def _resolve_level(cls) -> int:
        if cls._level is not None:
            return cls._level
        return getattr(logging, config.logging.level.upper(), logging.INFO)

    @classmethod
    def _configure_logger(cls, logger: logging.Logger, log_to_file: bool) -> None:
        logger.setLevel(cls._resolve_level())
        formatter = logging.Formatter(LOG_FORMAT)

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

        if log_to_file:
            os.makedirs(config.logging.log_dir, exist_ok=True)
            file_handler = RotatingFileHandler(
                filename=os.path.join(config.logging.log_dir, f"{ROOT_LOGGER_NAME}.log"),
                maxBytes=10485760,  # 10MB
                backupCount=5,
            )
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)

        # Handlers live on each module logger
        logger.propagate = False

    @classmethod
    def set_level(cls, level: Union[str, int]) -> None:
        """Change the level of every logger created so far and of those created later.

        Raises:
            ValueError: If `level` is not a logging level name
        """
        if isinstance(level, str):
            resolved = logging.getLevelName(level.upper())
            if not isinstance(resolved, int):
                raise ValueError(f"Unknown log level '{level}'")
            level = resolved
        cls._level = level
        for logger in cls._loggers.values():
            logger.setLevel(level)


class LoggerAdapter(logging.LoggerAdapter):
    """Prefixes messages with run context, e.g. `[model=arc_gp seed=3] ...`."""

    def __init__(self, logger, context=None):
        super().__init__(logger, context or {})

    def process(self, msg, kwargs):
        if self.extra:
            context_str = " ".join(f"{k}={v}" for k, v in self.extra.items())
            return f"[{context_str}] {msg}", kwargs
        return msg, kwargs


def get_module_logger(
    module_name: str, context: Optional[Dict] = None
) -> Union[logging.Logger, LoggerAdapter]:
    """Get a logger for a module, wrapped in a LoggerAdapter when context is given.

    Args:
        module_name: The name of the module
        context: Optional context information, e.g. {"model": "arc_gp", "seed": 3}
    """
    logger = LoggerFactory.get_logger(module_name)

    if context:
        return LoggerAdapter(logger, context)

    return logger
