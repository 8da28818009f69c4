"""Logger utility for Scatterlen"""

import os
import logging
from datetime import datetime

LOGGER_NAME = 'scatterlen'

logger = logging.getLogger(LOGGER_NAME)
logger.setLevel(logging.INFO)
logger.addHandler(logging.NullHandler())


class CustomFormatter(logging.Formatter):
    def format(self, record):
        # Commands pass their name explicitly; library records fall back to the module name
        command = getattr(record, 'command', record.name.rsplit('.', 1)[-1])
        stamp = datetime.fromtimestamp(record.created).strftime('%Y-%m-%d %H:%M:%S')
        # Format: DATE-TIME | COMMAND | MESSAGE
        return f"{stamp} | {command} | {super().format(record)}"


def configure_logging(log_dir, level=logging.INFO):
    """
    Attach the file handler writing ``scatterlen.log`` under ``log_dir``.

    Calling it again with the same directory is a no-op.

    Args:
        log_dir (str): Directory for the log file (created if missing)
        level (int): Logging level for the file handler

    Returns:
        str: Path of the log file
    """
    os.makedirs(log_dir, exist_ok=True)
    log_file = os.path.abspath(os.path.join(log_dir, 'scatterlen.log'))

    for handler in logger.handlers:
        if isinstance(handler, logging.FileHandler) and handler.baseFilename == log_file:
            return log_file

    file_handler = logging.FileHandler(log_file)
    file_handler.setLevel(level)
    file_handler.setFormatter(CustomFormatter('%(message)s'))
    logger.addHandler(file_handler)
    return log_file


def get_logger(name):
    """Child logger of the package logger, e.g. ``scatterlen.core.store``."""
    if name.startswith('scatterlen_cli.'):
        name = name[len('scatterlen_cli.'):]
    return logger.getChild(name)


def log_command(command_name, message):
    """
    Log a command execution with the specified message.

    Args:
        command_name (str): The name of the command being executed
        message (str): The message to log
    """
    logger.info(message, extra={'command': command_name})
