"""
Logging setup for command-line entry points.
"""

import logging
from typing import Any, Dict, Optional

DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(settings: Optional[Dict[str, Any]] = None, level: Optional[str] = None) -> None:
    """
    Configure the root logger from the ``logging`` config section.

    Args:
        settings: Mapping with optional level, format and file keys
        level: Level name overriding the configured one
    """
    settings = settings or {}
    level_name = (level or settings.get("level") or "INFO").upper()
    handlers = [logging.StreamHandler()]
    log_file = settings.get("file")
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    logging.basicConfig(
        level=getattr(logging, level_name, logging.INFO),
        format=settings.get("format") or DEFAULT_FORMAT,
        handlers=handlers,
        force=True,
    )
