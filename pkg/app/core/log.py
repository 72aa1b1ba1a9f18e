import logging
import sys

from .config import Settings, get_settings

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s'


def setup_logging(settings: Settings | None = None) -> None:
    """Configure root logging once; library modules only call getLogger."""
    settings = settings or get_settings()
    handlers: list[logging.Handler] = []
    if settings.LOG_TO_CONSOLE:
        # stderr keeps stdout free for command output
        handlers.append(logging.StreamHandler(sys.stderr))
    if settings.LOG_TO_FILE:
        handlers.append(logging.FileHandler(settings.LOG_FILE))
    if not handlers:
        handlers.append(logging.NullHandler())

    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL.upper(), logging.WARNING),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )
