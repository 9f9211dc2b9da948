import os
from dotenv import load_dotenv
from typing import Optional

# Load environment variables from .env file
load_dotenv()


class EnvConfig:
    """Environment configuration for hypercircle runs."""

    @staticmethod
    def _get_val(key: str, default: Optional[str] = None) -> Optional[str]:
        val = os.getenv(key, default)
        if val is None:
            return None
        val = val.strip()
        return val if val else default

    @staticmethod
    def _get_int(key: str, default: int, minimum: int) -> int:
        raw = EnvConfig._get_val(key)
        if raw is None:
            return default
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{key} must be an integer, got {raw!r}")
        if value < minimum:
            raise ValueError(f"{key} must be at least {minimum}, got {value}")
        return value

    @staticmethod
    def get_threads() -> int:
        """Fallback for --threads."""
        return EnvConfig._get_int("HYPERCIRCLE_THREADS", 1, 1)

    @staticmethod
    def get_output_dir() -> str:
        return EnvConfig._get_val("HYPERCIRCLE_OUTPUT_DIR", "./out")

    @staticmethod
    def get_log_level() -> str:
        level = EnvConfig._get_val("HYPERCIRCLE_LOG_LEVEL", "INFO").upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"HYPERCIRCLE_LOG_LEVEL must be a logging level name, got {level!r}")
        return level

    @staticmethod
    def get_validator_cap() -> int:
        """Largest subdivision vertex count for an exhaustive domain sweep."""
        return EnvConfig._get_int("HYPERCIRCLE_VALIDATOR_CAP", 18, 1)


# Convenience functions for direct access
def get_threads() -> int:
    return EnvConfig.get_threads()


def get_output_dir() -> str:
    return EnvConfig.get_output_dir()
