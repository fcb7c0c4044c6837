"""
Load and validate all configuration from .env file using Pydantic models.
"""

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Any
from pathlib import Path


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding='utf-8',
        case_sensitive=False,
        env_prefix='',  # No prefix needed
        extra='ignore',  # Ignore unknown env vars
        populate_by_name=True,
    )

    # Paths
    output_dir: Path = Field(default=Path("./results"), alias="OUTPUT_DIR")
    presets_file: Path = Field(default=Path("./presets.yaml"), alias="PRESETS_FILE")
    log_file: Path = Field(default=Path("./logs/complementarity.log"), alias="LOG_FILE")
    log_level: str = Field(default="INFO", alias="LOG_LEVEL")

    # Numerics
    n_quad: int = Field(default=1024, alias="N_QUAD", ge=8)
    phase_grid: int = Field(default=512, alias="PHASE_GRID", ge=8)
    ode_steps_per_unit: int = Field(default=10_000, alias="ODE_STEPS_PER_UNIT", ge=100)
    max_workers: int = Field(default=4, alias="MAX_WORKERS", ge=1)

    # Bound search defaults
    grid_density: int = Field(default=64, alias="GRID_DENSITY", ge=16)
    multistarts: int = Field(default=32, alias="MULTISTARTS", ge=1)
    local_tol: float = Field(default=1e-6, alias="LOCAL_TOL", gt=0)
    exclusion_eps: float = Field(default=1e-4, alias="EXCLUSION_EPS", gt=0)
    seed: int = Field(default=0, alias="SEED")
    mu_qubit: float = Field(default=4.085, alias="MU_QUBIT", gt=0)

    @field_validator("log_file", mode='before')
    @classmethod
    def validate_and_create_path(cls, v: Any) -> Path:
        if isinstance(v, str):
            path = Path(v)
        else:
            path = v

        if not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)

        return path

    @field_validator("presets_file", mode='before')
    @classmethod
    def validate_required_paths(cls, v: Any) -> Path:
        """Resolve the presets file next to this module when the relative path is missing."""
        path = Path(v) if isinstance(v, str) else v
        if not path.exists() and not path.is_absolute():
            fallback = Path(__file__).resolve().parent / path
            if fallback.exists():
                return fallback
        return path

    @field_validator("log_level", mode='after')
    @classmethod
    def check_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Unsupported log level: {v}")
        return level


settings = Settings()
