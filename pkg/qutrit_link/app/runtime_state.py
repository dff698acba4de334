import logging
import os


def get_log_level() -> int:
    name = os.getenv("LOG_LEVEL", "INFO").strip().upper()
    level = logging.getLevelName(name)
    return level if isinstance(level, int) else logging.INFO


def get_default_out_dir() -> str:
    return os.getenv("QUTRIT_LINK_OUT_DIR", "").strip() or "outputs"


def get_default_workers() -> int:
    try:
        value = int(os.getenv("QUTRIT_LINK_WORKERS", "1"))
    except ValueError:
        value = 1
    return max(1, value)
