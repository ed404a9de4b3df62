"""
Runtime configuration with validation.

This module implements:
- Fail Fast: Configuration is validated when the engine starts
- Convention over Configuration: Sensible defaults provided
- Type safety: All config values are typed
"""

import os
from dataclasses import dataclass, field
from dotenv import load_dotenv
from app.constants import (
    DEFAULT_MAX_ORDER,
    MIN_MAX_ORDER,
    MAX_MAX_ORDER,
    DEFAULT_TOL_ABS,
    DEFAULT_TOL_REL,
)
from app.exceptions import ConfigurationError

load_dotenv()


def _get_env_int(key: str, default: int) -> int:
    """
    Parse integer from environment variable with validation.

    Implements Fail Fast - invalid values cause immediate error.
    """
    try:
        return int(os.getenv(key, str(default)))
    except ValueError as e:
        raise ConfigurationError(
            f"Invalid integer value for {key}: {os.getenv(key)}"
        ) from e


def _get_env_float(key: str, default: float) -> float:
    """Parse float from environment variable, failing fast on garbage."""
    try:
        return float(os.getenv(key, str(default)))
    except ValueError as e:
        raise ConfigurationError(
            f"Invalid numeric value for {key}: {os.getenv(key)}"
        ) from e


@dataclass
class Config:
    """
    Engine configuration with automatic validation.

    Environment Variables:
        NOETHER_SEED: Seed for span-matching sample points
        NOETHER_MAX_ORDER: Global jet-order cap
        NOETHER_TOL_ABS: Absolute drift tolerance
        NOETHER_TOL_REL: Relative drift tolerance
        NOETHER_LOG_DIR: Directory for rotating log files
        NOETHER_LOG_LEVEL: Console log level
    """

    seed: int = field(default_factory=lambda: _get_env_int('NOETHER_SEED', 0))
    max_order: int = field(default_factory=lambda: _get_env_int('NOETHER_MAX_ORDER', DEFAULT_MAX_ORDER))

    # Drift tolerances
    tol_abs: float = field(default_factory=lambda: _get_env_float('NOETHER_TOL_ABS', DEFAULT_TOL_ABS))
    tol_rel: float = field(default_factory=lambda: _get_env_float('NOETHER_TOL_REL', DEFAULT_TOL_REL))

    # Logging
    log_dir: str = field(default_factory=lambda: os.getenv('NOETHER_LOG_DIR', 'logs').strip() or 'logs')
    log_level: str = field(default_factory=lambda: os.getenv('NOETHER_LOG_LEVEL', 'INFO').strip().upper())

    def __post_init__(self):
        """
        Validate configuration on initialization.

        Raises:
            ConfigurationError: If configuration is invalid
        """
        self._validate_max_order()
        self._validate_tolerances()
        self._validate_log_level()

    def _validate_max_order(self):
        if not MIN_MAX_ORDER <= self.max_order <= MAX_MAX_ORDER:
            raise ConfigurationError(
                f"NOETHER_MAX_ORDER must be in [{MIN_MAX_ORDER}, {MAX_MAX_ORDER}], "
                f"got {self.max_order}"
            )

    def _validate_tolerances(self):
        if self.tol_abs <= 0 or self.tol_rel <= 0:
            raise ConfigurationError(
                f"Drift tolerances must be positive, got abs={self.tol_abs} rel={self.tol_rel}"
            )

    def _validate_log_level(self):
        if self.log_level not in ('DEBUG', 'INFO', 'WARNING', 'ERROR'):
            raise ConfigurationError(
                f"NOETHER_LOG_LEVEL must be DEBUG, INFO, WARNING or ERROR, got {self.log_level}"
            )

    def override(self, **values) -> None:
        """
        Apply command-line overrides, re-running validation.

        None values are ignored so callers can pass argparse results directly.
        """
        for name, value in values.items():
            if value is not None:
                setattr(self, name, value)
        self.__post_init__()

    def to_dict(self) -> dict:
        """Export configuration as dictionary (for logging)."""
        return {
            'seed': self.seed,
            'max_order': self.max_order,
            'tol_abs': self.tol_abs,
            'tol_rel': self.tol_rel,
            'log_dir': self.log_dir,
            'log_level': self.log_level,
        }


# Singleton instance - validated on first import (Fail Fast)
try:
    config = Config()
except ConfigurationError as e:
    raise ConfigurationError(
        f"Engine startup failed due to invalid configuration: {e.message}"
    ) from e
