import os
from typing import Optional
from dotenv import load_dotenv

DEFAULT_SIZE_CAP = 64
DEFAULT_ISO_CAP = 5000

# Unit vectors must have norm 1 within this bound.
NORM_TOLERANCE = 1e-12
# Cap membership is decided on dot products compared with this slack.
DOT_TOLERANCE = 1e-9
SIMULATION_BLOCK = 65536


def _int_setting(name: str, default: int, override: Optional[int]) -> int:
    """
    Resolve an integer setting: explicit override, then environment / .env, then default.
    """
    if override is not None:
        return int(override)
    load_dotenv()
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")
    if value < 1:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def get_size_cap(override: Optional[int] = None) -> int:
    """Element-count cap for orthocomplementation enumeration."""
    return _int_setting("SPSLAB_SIZE_CAP", DEFAULT_SIZE_CAP, override)


def get_iso_cap(override: Optional[int] = None) -> int:
    """Node cap (states + properties) for isomorphism search."""
    return _int_setting("SPSLAB_ISO_CAP", DEFAULT_ISO_CAP, override)
