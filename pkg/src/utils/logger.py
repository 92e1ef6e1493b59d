# src/utils/logger.py
import logging
import os

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logger(name, log_file=None, level=logging.INFO):
    log_file = log_file or os.environ.get("LATTICE_LOG_FILE", "lattice.log")
    logger = logging.getLogger(name)
    logger.setLevel(level)

    # Already configured by an earlier import
    if logger.handlers:
        return logger

    # File handler
    file_handler = logging.FileHandler(log_file)
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(file_handler)

    # Console handler
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(console_handler)

    return logger


def set_log_level(level):
    """Apply a level name like "DEBUG" to every toolkit logger already created."""
    numeric = getattr(logging, str(level).upper(), None)
    if not isinstance(numeric, int):
        raise ValueError(f"❌ Unknown log level: {level}")
    for logger in logging.Logger.manager.loggerDict.values():
        if isinstance(logger, logging.Logger) and logger.handlers:
            logger.setLevel(numeric)
    return numeric
