"""
Shared rich console and logging setup.

Library modules only call ``logging.getLogger(__name__)``; the CLI (or a
demo script) calls :func:`configure_logging` once to route records through a
``RichHandler`` on stderr.
"""

import logging
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler

from .themes import get_default_theme

_console: Optional[Console] = None
_handler: Optional[RichHandler] = None

LEVELS = {0: logging.WARNING, 1: logging.INFO}


def get_console(stderr: bool = True) -> Console:
    """Return the process-wide stderr console styled with the report theme."""
    global _console
    if _console is None:
        _console = Console(stderr=stderr, theme=get_default_theme().get_rich_theme())
    return _console


def configure_logging(verbosity: int = 0, console: Optional[Console] = None) -> logging.Logger:
    """
    Install a single RichHandler on the package logger.

    Args:
        verbosity: 0 = warnings, 1 = info, 2+ = debug; negative silences
                   everything below errors
        console: Console to log to (defaults to the shared stderr console)

    Returns:
        The configured package logger
    """
    global _handler
    if verbosity < 0:
        level = logging.ERROR
    else:
        level = LEVELS.get(verbosity, logging.DEBUG)

    logger = logging.getLogger("affective_polarization")
    if _handler is not None:
        logger.removeHandler(_handler)
    _handler = RichHandler(
        console=console or get_console(),
        show_path=False,
        rich_tracebacks=True,
        markup=False,
    )
    _handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
    logger.addHandler(_handler)
    logger.setLevel(level)
    logger.propagate = False
    return logger
