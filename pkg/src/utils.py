import os
import json
import logging
from typing import Optional

from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)

DEFAULT_SIZE_CAP = 1_000_000


class OpkitError(Exception):
    """Base class for every error raised by the library."""


class InputError(OpkitError, ValueError):
    """Malformed input: bad definition files, ill-formed cospans, mismatched degrees."""


class InvalidStructure(OpkitError, ValueError):
    """An input was rejected because it fails its laws; carries the witnessing report."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class SizeCapExceeded(OpkitError):
    """A construction would produce a level larger than the configured cap."""


class TruncationError(OpkitError):
    """An operation needed an arity or degree above the stored bound."""


class TruncationInsufficient(TruncationError):
    """Caps are too small to certify a truncated colimit."""


def get_size_cap(override: Optional[int] = None) -> int:
    """
    Returns the atom cap for a single level, from the override or OPKIT_SIZE_CAP.
    """
    if override is not None:
        return override
    raw = os.getenv("OPKIT_SIZE_CAP")
    if not raw:
        return DEFAULT_SIZE_CAP
    try:
        return int(raw)
    except ValueError:
        logger.error(f"Ignoring non-integer OPKIT_SIZE_CAP={raw!r}")
        return DEFAULT_SIZE_CAP


def ensure_within_cap(size: int, what: str, size_cap: Optional[int] = None):
    """
    Raises SizeCapExceeded when `size` atoms would exceed the cap.
    """
    cap = get_size_cap(size_cap)
    if size > cap:
        raise SizeCapExceeded(f"{what} would hold {size} atoms (cap {cap})")


def get_log_dir() -> str:
    return os.getenv("OPKIT_LOG_DIR", "logs")


def append_jsonl(filepath: str, data: dict):
    """
    Appends a dictionary as a JSON line to the specified file.
    """
    try:
        directory = os.path.dirname(filepath)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(filepath, "a") as f:
            f.write(json.dumps(data, sort_keys=True, default=str) + "\n")
    except Exception as e:
        logger.error(f"Failed to write to log file {filepath}: {e}")
