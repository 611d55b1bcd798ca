"""
Settings configuration for reflx
"""

from pathlib import Path
from typing import Optional
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process settings with environment variable support (prefix REFLX_)"""

    model_config = SettingsConfigDict(
        env_prefix="REFLX_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Application Configuration
    app_name: str = Field(default="reflx")
    app_version: str = Field(default="1.0.0")
    log_level: str = Field(default="INFO")
    log_format: str = Field(default="json")

    # Reproducibility: REFLX_SEED overrides the seed of any training config
    seed: Optional[int] = Field(default=None)

    # Evaluation Configuration
    workers: int = Field(default=1)
    zeroth_order_budget: int = Field(default=10_000)

    # Paths
    data_dir: Path = Field(default=Path("data"))
    runs_dir: Path = Field(default=Path("runs"))

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level"""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"Log level must be one of {valid_levels}")
        return v.upper()

    @field_validator("log_format")
    @classmethod
    def validate_log_format(cls, v: str) -> str:
        if v.lower() not in ("json", "console"):
            raise ValueError("Log format must be 'json' or 'console'")
        return v.lower()

    @field_validator("workers", "zeroth_order_budget")
    @classmethod
    def validate_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be at least 1")
        return v


# Global settings instance
_settings = None

def get_settings() -> Settings:
    """Get settings instance"""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings

def reload_settings() -> Settings:
    """Reload settings from environment"""
    global _settings
    _settings = Settings()
    return _settings
