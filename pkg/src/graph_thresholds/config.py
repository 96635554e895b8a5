"""Application configuration using pydantic-settings."""

from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Application settings with environment variable support.
    Every setting has a default, replaced by a GRAPH_THRESHOLDS_* environment
    variable or an entry in the .env file when present.
    preference order:
    environment variable > .env file > default value in this class
    """

    # Reproducibility: bare invocations always use this seed (never wall-clock)
    default_seed: int = 12345

    # Capacity optimizer (replicator ascent)
    restarts: int = 64
    max_iterations: int = 100_000
    ascent_tolerance: float = 1e-14
    closed_form_tolerance: float = 1e-9
    oracle_tolerance: float = 1e-6
    grid_steps: int = 60
    support_enum_max_vertices: int = 6

    # Desk-scale contracts for exact searches
    exact_clique_max_vertices: int = 20
    chromatic_max_vertices: int = 12

    # Monte Carlo
    trial_block_size: int = 4096
    workers: int = 1
    report_sigmas: float = 4.0

    # Output
    significant_digits: int = 12
    debug: bool = False
    log_dir: Path = Path("logs")

    model_config = SettingsConfigDict(
        env_prefix="GRAPH_THRESHOLDS_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
    )

    def seed_source(self) -> str:
        """Where default_seed came from: 'environment' or 'default'."""
        return "environment" if "default_seed" in self.model_fields_set else "default"


# Global settings instance, read once at import.
settings = Settings()
