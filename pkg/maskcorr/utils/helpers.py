"""
Utility Functions

Environment loading, seed derivation and input parsing shared by the
services and the command line.
"""

import hashlib
import logging
import os
from pathlib import Path

import numpy as np
from dotenv import load_dotenv

from .errors import InvalidStateError

logger = logging.getLogger(__name__)

DEFAULT_SEED = 42
SEED_ENV = "MASKCORR_SEED"
WORKERS_ENV = "MASKCORR_WORKERS"
LOG_LEVEL_ENV = "MASKCORR_LOG_LEVEL"

# Inline states within this distance of unit norm are renormalized, others rejected.
NORMALIZATION_SLACK = 1e-6


def load_environment() -> bool:
    """Load environment variables from the first .env file found."""
    env_locations = [
        Path('.env'),
        Path('../.env'),
        Path(__file__).parent.parent.parent / '.env'
    ]

    for env_path in env_locations:
        if env_path.exists():
            # variables already set in the process win over the file
            load_dotenv(env_path, override=False)
            logger.debug("Loaded environment from %s", env_path)
            return True

    return False


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw.strip())
    except ValueError:
        logger.warning("Ignoring non-integer %s=%r", name, raw)
        return default


def get_default_seed() -> int:
    """Master seed from MASKCORR_SEED, falling back to 42."""
    load_environment()
    return _env_int(SEED_ENV, DEFAULT_SEED)


def get_default_workers() -> int:
    load_environment()
    return max(1, _env_int(WORKERS_ENV, 1))


def get_log_level() -> str:
    load_environment()
    return os.getenv(LOG_LEVEL_ENV, "WARNING").upper()


def derive_seed(master_seed: int, name: str) -> int:
    """
    Stable 32-bit sub-seed for a named run.

    The same (master_seed, name) gives the same value in every process.
    """
    digest = hashlib.md5(f"{int(master_seed)}:{name}".encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")


def parse_inline_state(text: str) -> np.ndarray:
    """
    Parse ``re0,im0,re1,im1`` into a normalized qubit amplitude pair.

    Raises:
        InvalidStateError: On malformed input, a zero vector, or a norm
            further than NORMALIZATION_SLACK from 1
    """
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise InvalidStateError(f"Expected four comma-separated reals re0,im0,re1,im1, got '{text}'")
    try:
        re0, im0, re1, im1 = (float(p) for p in parts)
    except ValueError:
        raise InvalidStateError(f"Could not parse '{text}' as four reals") from None

    return normalize_qubit(np.array([complex(re0, im0), complex(re1, im1)], dtype=np.complex128))


def normalize_qubit(amplitudes: np.ndarray) -> np.ndarray:
    """Renormalize a user-supplied qubit whose norm is already within NORMALIZATION_SLACK of 1."""
    amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    if amps.size != 2:
        raise InvalidStateError(f"A qubit state has 2 amplitudes, got {amps.size}")
    if not np.all(np.isfinite(amps)):
        raise InvalidStateError("State amplitudes must be finite")

    norm = float(np.linalg.norm(amps))
    if norm == 0.0:
        raise InvalidStateError("Zero vector cannot be normalized")
    if abs(norm - 1.0) > NORMALIZATION_SLACK:
        raise InvalidStateError(f"State norm {norm:.9g} is not within {NORMALIZATION_SLACK:g} of 1")
    return amps / norm
