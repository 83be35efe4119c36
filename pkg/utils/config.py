"""Environment-backed settings and logging setup for the command line."""

import logging
import os
import sys
from dataclasses import dataclass
from typing import Optional

from dotenv import find_dotenv, load_dotenv

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(name)s - %(message)s"


@dataclass(frozen=True)
class Settings:
    """Defaults read from the environment (and a ``.env`` file when present)."""

    seed: Optional[int] = None
    jobs: int = 1
    log_level: str = "INFO"
    val_binary: Optional[str] = None


def _int_env(name: str) -> Optional[int]:
    value = os.getenv(name)
    if value is None or not value.strip():
        return None
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {value!r}") from None


def load_settings(dotenv: bool = True) -> Settings:
    """
    Read PLANGEN_SEED, PLANGEN_JOBS, PLANGEN_LOG_LEVEL and PLANGEN_VAL.

    Args:
        dotenv: Load a ``.env`` file from the working directory first. Values
            already in the environment win.
    """
    if dotenv:
        load_dotenv(find_dotenv(usecwd=True), override=False)
    jobs = _int_env("PLANGEN_JOBS")
    return Settings(
        seed=_int_env("PLANGEN_SEED"),
        jobs=jobs if jobs and jobs > 0 else 1,
        log_level=os.getenv("PLANGEN_LOG_LEVEL", "INFO").upper(),
        val_binary=os.getenv("PLANGEN_VAL") or None,
    )


def configure_logging(verbose: bool = False, level: str = "INFO") -> None:
    """Install a single stderr handler; ``verbose`` forces DEBUG."""
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if verbose else getattr(logging, level.upper(), logging.INFO))
