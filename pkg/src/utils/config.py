"""
Configuration management for the concentra verification lab.

Handles environment variables, JSON config files and the guards
that keep exhaustive enumeration at desk scale.
"""

import json
import math
import os
from dataclasses import dataclass, field, fields, asdict
from pathlib import Path
from typing import Any, Dict, Optional
import logging

from src.utils.exceptions import ConfigurationError


ENV_PREFIX = "CONCENTRA_"

DEFAULT_CYCLE_GUARDS: Dict[int, int] = {3: 2000, 4: 400, 5: 120}
FALLBACK_CYCLE_GUARD = 60


@dataclass
class LabConfig:
    """
    Lab configuration data class.

    Contains only configuration data and validation logic.
    """

    # Logging Configuration
    log_level: str = "INFO"
    log_file: Optional[str] = None

    # Execution
    threads: int = 1

    # Enumeration guards
    max_enumeration_m: int = 24
    max_distance_m: int = 14
    brute_force_max_generators: int = 12
    cycle_guards: Dict[int, int] = field(default_factory=lambda: dict(DEFAULT_CYCLE_GUARDS))

    # Solver
    solver_tolerance: float = 1e-9

    # Log conventions for degree buckets and thresholds
    bucket_log_base: float = 2.0
    loglog_base: float = math.e

    # Theorem constants
    default_c: float = 1.0
    default_epsilon: float = 0.1

    def __post_init__(self) -> None:
        """Validate configuration after initialization."""
        # JSON object keys arrive as strings
        self.cycle_guards = {int(k): int(v) for k, v in self.cycle_guards.items()}
        self._validate_config()

    def _validate_config(self) -> None:
        """Validate configuration values."""
        valid_log_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if self.log_level not in valid_log_levels:
            raise ConfigurationError(
                f"Invalid log level: {self.log_level}. Must be one of: {valid_log_levels}",
                "log_level",
            )

        if self.threads < 1:
            raise ConfigurationError("threads must be at least 1", "threads")

        if not (1 <= self.max_enumeration_m <= 30):
            raise ConfigurationError(
                "max_enumeration_m must be between 1 and 30", "max_enumeration_m"
            )

        if not (1 <= self.max_distance_m <= self.max_enumeration_m):
            raise ConfigurationError(
                "max_distance_m must be between 1 and max_enumeration_m",
                "max_distance_m",
            )

        if self.brute_force_max_generators < 1:
            raise ConfigurationError(
                "brute_force_max_generators must be positive",
                "brute_force_max_generators",
            )

        if any(n < 3 for n in self.cycle_guards.values()):
            raise ConfigurationError("cycle guards must allow at least 3 vertices", "cycle_guards")

        if not (0 < self.solver_tolerance < 1e-3):
            raise ConfigurationError(
                "solver_tolerance must be in (0, 1e-3)", "solver_tolerance"
            )

        for key in ("bucket_log_base", "loglog_base"):
            base = getattr(self, key)
            if base <= 1:
                raise ConfigurationError(f"{key} must be greater than 1", key)

        if self.default_c < 0:
            raise ConfigurationError("default_c must be nonnegative", "default_c")

        if self.default_epsilon <= 0:
            raise ConfigurationError("default_epsilon must be positive", "default_epsilon")

    def cycle_guard(self, k: int) -> int:
        """Largest vertex count allowed for k-cycle enumeration."""
        return self.cycle_guards.get(k, FALLBACK_CYCLE_GUARD)

    def to_dict(self) -> Dict[str, Any]:
        """Plain dictionary echo of the configuration."""
        return asdict(self)

    @classmethod
    def load_from_file(cls, path: str, base: Optional["LabConfig"] = None) -> "LabConfig":
        """
        Load configuration values from a JSON file.

        Unknown keys are ignored so the same file can also carry
        experiment settings. Values from the file override `base`.

        Raises:
            ConfigurationError: If the file is missing or malformed
        """
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigurationError(f"Config file not found: {path}", "config")
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Config file is not valid JSON: {e}", "config")

        if not isinstance(data, dict):
            raise ConfigurationError("Config file must contain a JSON object", "config")

        known = {f.name for f in fields(cls)}
        merged = (base or cls()).to_dict()
        merged.update({k: v for k, v in data.items() if k in known})
        return cls(**merged)


class ConfigManager:
    """
    Configuration manager for the lab.

    Handles only configuration loading from the environment.
    """

    def __init__(self, env_file: Optional[str] = None) -> None:
        """
        Initialize configuration manager.

        Args:
            env_file: Optional path to .env file
        """
        self.env_file = env_file
        self.logger = logging.getLogger(__name__)

    def load_config(self) -> LabConfig:
        """
        Load configuration from environment variables.

        Returns:
            Loaded lab configuration

        Raises:
            ConfigurationError: If configuration loading fails
        """
        try:
            if self.env_file and Path(self.env_file).exists():
                self._load_env_file(self.env_file)

            config = LabConfig(
                log_level=os.getenv(f"{ENV_PREFIX}LOG_LEVEL", "INFO"),
                log_file=os.getenv(f"{ENV_PREFIX}LOG_FILE") or None,
                threads=int(os.getenv(f"{ENV_PREFIX}THREADS", "1")),
                max_enumeration_m=int(os.getenv(f"{ENV_PREFIX}MAX_ENUMERATION_M", "24")),
                max_distance_m=int(os.getenv(f"{ENV_PREFIX}MAX_DISTANCE_M", "14")),
                bucket_log_base=float(os.getenv(f"{ENV_PREFIX}BUCKET_LOG_BASE", "2")),
            )

            self.logger.debug("Configuration loaded", extra={"threads": config.threads})
            return config

        except ValueError as e:
            raise ConfigurationError(f"Invalid configuration value: {str(e)}")
        except Exception as e:
            if isinstance(e, ConfigurationError):
                raise
            raise ConfigurationError(f"Failed to load configuration: {str(e)}")

    def _load_env_file(self, env_file: str) -> None:
        """
        Load environment variables from .env file.

        Args:
            env_file: Path to .env file
        """
        try:
            with open(env_file, "r") as f:
                for line in f:
                    line = line.strip()
                    if line and not line.startswith("#") and "=" in line:
                        key, value = line.split("=", 1)
                        value = value.strip().strip("'\"")
                        os.environ[key.strip()] = value
        except OSError as e:
            raise ConfigurationError(f"Failed to load .env file: {str(e)}", "env_file")


# Global configuration manager instance
_config_manager: Optional[ConfigManager] = None


def get_config_manager() -> ConfigManager:
    """Get the global configuration manager."""
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager


def load_lab_config() -> LabConfig:
    """Load and return lab configuration from the environment."""
    return get_config_manager().load_config()
