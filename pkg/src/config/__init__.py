"""
Configuration management for reflx
"""

from .settings import Settings, get_settings, reload_settings
from .train_config import (
    TrainConfig, TaskEnum, BackendEnum, ConsistencyModeEnum, ConfigError, load_train_config
)

__all__ = [
    "Settings",
    "get_settings",
    "reload_settings",
    "TrainConfig",
    "TaskEnum",
    "BackendEnum",
    "ConsistencyModeEnum",
    "ConfigError",
    "load_train_config",
]
