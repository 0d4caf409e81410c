"""Logging utilities for entwit runs"""

import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

from rich.logging import RichHandler

from ..config import Settings

FORMAT = "%(asctime)s [%(name)s] %(levelname)s: %(message)s"


def setup_run_logging(
    filename: Optional[str] = None, verbose: bool = False, log_dir: Optional[Path] = None
) -> logging.Logger:
    """Setup file logging for a CLI run

    Args:
        filename: Optional custom log filename. If not provided, uses date-based name.
        verbose: Also echo DEBUG records to the console through rich.
        log_dir: Directory for the log file, defaults to ENTWIT_LOG_DIR.
    """
    log_dir = Path(log_dir) if log_dir is not None else Settings.from_env().log_dir
    log_dir.mkdir(parents=True, exist_ok=True)

    if filename:
        log_file = log_dir / filename
    else:
        today = datetime.now().strftime("%Y-%m-%d")
        log_file = log_dir / f"run_{today}.log"

    logger = logging.getLogger("entwit")
    logger.setLevel(logging.DEBUG)

    target = str(log_file.resolve())
    if not any(isinstance(h, logging.FileHandler) and h.baseFilename == target for h in logger.handlers):
        handler = logging.FileHandler(log_file)
        handler.setFormatter(logging.Formatter(FORMAT))
        logger.addHandler(handler)

    if verbose and not any(isinstance(h, RichHandler) for h in logger.handlers):
        console = RichHandler(show_path=False)
        console.setLevel(logging.DEBUG)
        logger.addHandler(console)

    return logger


def log_run(
    logger: logging.Logger,
    command: str,
    config: Dict[str, Any],
    result: Optional[Dict[str, Any]] = None,
    error: Optional[Exception] = None,
) -> None:
    """Log one CLI command in plain text format"""
    options = "\n\t".join(f"{k}: {v}" for k, v in sorted(config.items()) if v is not None)

    if error:
        message = f"""
COMMAND: {command}
ERROR: {error}
OPTIONS:
\t{options}
"""
    else:
        summary = "\n\t".join(f"{k}: {v}" for k, v in sorted((result or {}).items()))
        message = f"""
COMMAND: {command}
OPTIONS:
\t{options}
RESULT:
\t{summary or "none"}
"""

    logger.info(message.strip())
