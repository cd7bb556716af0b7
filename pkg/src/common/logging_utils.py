from __future__ import annotations

import logging
from pathlib import Path

LOGGER_NAME = "ofdm_lab"
LOG_FORMAT = "%(asctime)s %(levelname)s %(message)s"


def setup_logging(level: str, log_dir: Path | None = None, run_id: str | None = None) -> logging.Logger:
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(getattr(logging, level.upper(), logging.INFO))
    logger.propagate = False

    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(LOG_FORMAT)

    console = logging.StreamHandler()
    console.setFormatter(formatter)
    logger.addHandler(console)

    if log_dir is not None and run_id:
        log_dir.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_dir / f"run_{run_id}.log", encoding="utf-8")
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    # library modules log under src.ofdm.*; route them through the same handlers
    library = logging.getLogger("src.ofdm")
    library.setLevel(logger.level)
    library.propagate = False
    for handler in list(library.handlers):
        library.removeHandler(handler)
    for handler in logger.handlers:
        library.addHandler(handler)

    return logger
