import os
import logging
from logging.handlers import RotatingFileHandler
from contextlib import contextmanager
from datetime import datetime

from app.constants import LOG_MAX_BYTES, LOG_BACKUP_COUNT


def setup_logger(log_dir: str = None, console_level: str = None):
    log_dir = log_dir or os.getenv('NOETHER_LOG_DIR', 'logs')
    console_level = (console_level or os.getenv('NOETHER_LOG_LEVEL', 'INFO')).upper()
    if not os.path.exists(log_dir):
        os.makedirs(log_dir)

    log_filename = os.path.join(log_dir, f'noether_{datetime.now().strftime("%Y%m%d")}.log')

    logger = logging.getLogger('noether')
    logger.setLevel(logging.DEBUG)

    log_formatter = logging.Formatter(
        '[%(asctime)s] [%(levelname)s] %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    # Avoid adding multiple handlers if setup is called multiple times
    if not logger.handlers:
        file_handler = RotatingFileHandler(
            log_filename,
            maxBytes=LOG_MAX_BYTES,
            backupCount=LOG_BACKUP_COUNT
        )
        file_handler.setFormatter(log_formatter)
        logger.addHandler(file_handler)

        # stderr, so reports written to stdout stay clean
        console_handler = logging.StreamHandler()
        console_handler.setLevel(getattr(logging, console_level, logging.INFO))
        console_handler.setFormatter(log_formatter)
        logger.addHandler(console_handler)

    return logger


def set_console_level(level: str) -> None:
    """Adjust the console handler level after startup."""
    for handler in logger.handlers:
        if type(handler) is logging.StreamHandler:
            handler.setLevel(getattr(logging, level.upper(), logging.INFO))


logger = setup_logger()


class WarningCollector(logging.Handler):
    """Keeps the text of WARNING records emitted while attached."""

    def __init__(self):
        super().__init__(level=logging.WARNING)
        self.messages = []

    def emit(self, record: logging.LogRecord) -> None:
        if record.levelno == logging.WARNING:
            self.messages.append(record.getMessage())


@contextmanager
def capture_warnings():
    """Collect warnings logged inside the block, for the report."""
    collector = WarningCollector()
    logger.addHandler(collector)
    try:
        yield collector.messages
    finally:
        logger.removeHandler(collector)
