import logging
import sys

from core.config import get_settings


def setup_logger():
    """Sets up the shared logger for the counter, CLI and worker."""
    settings = get_settings()
    logger = logging.getLogger("ProjCount")
    logger.setLevel(settings.log_level.upper())

    # Prevent adding duplicate handlers if this function is called multiple times
    if logger.handlers:
        return logger

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    # stdout carries the count lines, so logs go to stderr
    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setFormatter(formatter)
    logger.addHandler(stream_handler)

    if settings.log_file:
        file_handler = logging.FileHandler(settings.log_file)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


# Create a single logger instance to be used across the application
logger = setup_logger()
