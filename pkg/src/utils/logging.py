import logging
import sys

import config


def get_logger(component_name: str) -> logging.Logger:
    """
    Create a logger for a specific component with formatted output.

    Output goes to stderr: stdout is reserved for the JSON the CLI prints.

    Args:
        component_name: Name of the component (e.g., 'solver', 'dominance')

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(f"robust_choice.{component_name}")

    # Avoid adding handlers multiple times
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        formatter = logging.Formatter(
            f'[%(asctime)s] [{component_name.upper()}] %(levelname)s: %(message)s',
            datefmt='%H:%M:%S'
        )
        handler.setFormatter(formatter)
        logger.addHandler(handler)
        logger.setLevel(getattr(logging, str(config.LOG_LEVEL).upper(), logging.INFO))
        logger.propagate = False

    return logger


def log_table(logger: logging.Logger, rows: dict) -> None:
    """Log a key/value block, one aligned line per entry."""
    for k, v in rows.items():
        logger.info(f"{k:<28} : {v}")
