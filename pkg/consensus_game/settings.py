"""
Process-level settings
Read from the environment, optionally seeded from a .env file
"""
import logging
import os
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv


logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DEFAULT_MAX_TREE_LEAVES = 1 << 24
DEFAULT_OUTPUT_DIR = "./runs"


def _default_workers() -> int:
    return max(1, (os.cpu_count() or 1) - 1)


@dataclass(frozen=True)
class Settings:
    """Environment configuration shared by the CLI, the engine and the sweep pool"""
    log_level: str = "INFO"
    max_workers: int = 1
    max_tree_leaves: int = DEFAULT_MAX_TREE_LEAVES
    output_dir: str = DEFAULT_OUTPUT_DIR

    @classmethod
    def from_env(cls) -> "Settings":
        """
        Build settings from CONSENSUS_GAME_* environment variables

        Raises:
            ValueError: If a numeric variable does not parse or is not positive
        """
        load_dotenv()
        log_level = os.getenv("CONSENSUS_GAME_LOG_LEVEL", "INFO").upper()
        max_workers = int(os.getenv("CONSENSUS_GAME_MAX_WORKERS", str(_default_workers())))
        max_tree_leaves = int(os.getenv("CONSENSUS_GAME_MAX_TREE_LEAVES", str(DEFAULT_MAX_TREE_LEAVES)))
        output_dir = os.getenv("CONSENSUS_GAME_OUTPUT_DIR", DEFAULT_OUTPUT_DIR)

        if max_workers < 1:
            raise ValueError(f"CONSENSUS_GAME_MAX_WORKERS must be positive, got {max_workers}")
        if max_tree_leaves < 1:
            raise ValueError(f"CONSENSUS_GAME_MAX_TREE_LEAVES must be positive, got {max_tree_leaves}")

        return cls(
            log_level=log_level,
            max_workers=max_workers,
            max_tree_leaves=max_tree_leaves,
            output_dir=output_dir,
        )


# Global settings instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get global settings instance"""
    global _settings

    if _settings is None:
        _settings = Settings.from_env()
        logger.debug(f"Loaded settings: {_settings}")

    return _settings


def reset_settings():
    """Forget the cached settings so the next call re-reads the environment"""
    global _settings
    _settings = None


def configure_logging(level: Optional[str] = None, quiet: bool = False):
    """Configure root logging once for command-line use"""
    if quiet:
        level = "WARNING"
    logging.basicConfig(
        level=getattr(logging, (level or get_settings().log_level), logging.INFO),
        format=LOG_FORMAT,
    )
